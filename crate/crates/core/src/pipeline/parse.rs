//! Hand-written parser and canonical serializer for the CI-config subset:
//!
//! ```yaml
//! stages:
//!   - build
//!
//! job-name:
//!   stage: build
//!   script:
//!     - make
//!   artifacts:
//!     paths:
//!       - build/
//! ```
//!
//! Block mappings and block lists only. No anchors, flow collections,
//! multi-line scalars, includes or other keywords.

use std::fmt::Write as _;

use super::{Job, Pipeline, PipelineError};

const UNSUPPORTED_TOP_LEVEL: &[&str] = &[
    "image",
    "services",
    "before_script",
    "after_script",
    "variables",
    "cache",
    "include",
    "default",
    "workflow",
];

#[derive(Debug, Clone, Copy)]
struct Line<'a> {
    no: usize,
    indent: usize,
    text: &'a str,
}

fn syntax(line: usize, message: impl Into<String>) -> PipelineError {
    PipelineError::Syntax {
        line,
        message: message.into(),
    }
}

fn lex(input: &str) -> Result<Vec<Line<'_>>, PipelineError> {
    let mut lines = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let no = i + 1;
        let trimmed = raw.trim_end();
        let text = trimmed.trim_start_matches(' ');
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text.starts_with('\t') {
            return Err(syntax(no, "tab character in indentation"));
        }
        let indent = trimmed.len() - text.len();
        if lines.is_empty() && indent == 0 && text == "---" {
            continue;
        }
        lines.push(Line { no, indent, text });
    }
    Ok(lines)
}

fn is_item(text: &str) -> bool {
    text == "-" || text.starts_with("- ")
}

fn is_job_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Splits `key:` / `key: value`, dropping trailing comments.
fn split_key(line: Line<'_>) -> Result<(&str, Option<&str>), PipelineError> {
    let colon = line
        .text
        .char_indices()
        .find(|&(i, c)| c == ':' && line.text[i + 1..].chars().next().is_none_or(|n| n == ' '))
        .map(|(i, _)| i)
        .ok_or_else(|| syntax(line.no, format!("expected `key:`, found `{}`", line.text)))?;
    let key = &line.text[..colon];
    if key.is_empty()
        || !key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(syntax(line.no, format!("invalid key `{key}`")));
    }
    let rest = line.text[colon + 1..].trim();
    let value = (!rest.is_empty() && !rest.starts_with('#')).then_some(rest);
    Ok((key, value))
}

fn parse_scalar(s: &str, line: usize) -> Result<String, PipelineError> {
    if let Some(body) = s.strip_prefix('"') {
        return double_quoted(body, line);
    }
    if let Some(body) = s.strip_prefix('\'') {
        return single_quoted(body, line);
    }
    let value = match s.find(" #") {
        Some(cut) => s[..cut].trim_end(),
        None => s,
    };
    if value.is_empty() {
        return Err(syntax(line, "empty value"));
    }
    if let Some(c) = value.chars().next().filter(|c| "[]{}&*!|>%@`".contains(*c)) {
        return Err(syntax(
            line,
            format!("unsupported YAML syntax starting with `{c}`; quote the value"),
        ));
    }
    if value.contains(": ") || value.ends_with(':') {
        return Err(syntax(
            line,
            format!("plain value `{value}` contains `: `; quote it"),
        ));
    }
    Ok(value.to_string())
}

fn after_quote(rest: &str, line: usize) -> Result<(), PipelineError> {
    let rest = rest.trim_start();
    if rest.is_empty() || rest.starts_with('#') {
        Ok(())
    } else {
        Err(syntax(
            line,
            format!("unexpected text `{rest}` after quoted value"),
        ))
    }
}

fn double_quoted(body: &str, line: usize) -> Result<String, PipelineError> {
    let mut out = String::new();
    let mut chars = body.char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '"' => {
                after_quote(&body[i + 1..], line)?;
                return Ok(out);
            }
            '\\' => {
                let (_, e) = chars
                    .next()
                    .ok_or_else(|| syntax(line, "unterminated escape sequence"))?;
                let hex_digits = match e {
                    '\\' => {
                        out.push('\\');
                        continue;
                    }
                    '"' => {
                        out.push('"');
                        continue;
                    }
                    '/' => {
                        out.push('/');
                        continue;
                    }
                    '0' => {
                        out.push('\0');
                        continue;
                    }
                    'n' => {
                        out.push('\n');
                        continue;
                    }
                    't' => {
                        out.push('\t');
                        continue;
                    }
                    'r' => {
                        out.push('\r');
                        continue;
                    }
                    'x' => 2,
                    'u' => 4,
                    'U' => 8,
                    other => return Err(syntax(line, format!("unknown escape `\\{other}`"))),
                };
                let mut code = 0u32;
                for _ in 0..hex_digits {
                    let d = chars
                        .next()
                        .and_then(|(_, h)| h.to_digit(16))
                        .ok_or_else(|| syntax(line, "invalid hex escape"))?;
                    code = code * 16 + d;
                }
                let ch = char::from_u32(code)
                    .ok_or_else(|| syntax(line, format!("invalid code point {code:#x}")))?;
                out.push(ch);
            }
            c => out.push(c),
        }
    }
    Err(syntax(line, "unterminated double-quoted value"))
}

fn single_quoted(body: &str, line: usize) -> Result<String, PipelineError> {
    let mut out = String::new();
    let mut rest = body;
    loop {
        let q = rest
            .find('\'')
            .ok_or_else(|| syntax(line, "unterminated single-quoted value"))?;
        out.push_str(&rest[..q]);
        rest = &rest[q + 1..];
        match rest.strip_prefix('\'') {
            Some(r) => {
                out.push('\'');
                rest = r;
            }
            None => {
                after_quote(rest, line)?;
                return Ok(out);
            }
        }
    }
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

struct ParsedJob {
    job: Job,
    line: usize,
    stage_line: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Line<'a>> {
        self.lines.get(self.pos).copied()
    }

    fn block_list(&mut self, parent_indent: usize) -> Result<Vec<(String, usize)>, PipelineError> {
        let mut items = Vec::new();
        let mut item_indent = None;
        while let Some(l) = self.peek() {
            if !is_item(l.text) || l.indent < parent_indent {
                break;
            }
            match item_indent {
                None => item_indent = Some(l.indent),
                Some(n) if n != l.indent => {
                    return Err(syntax(l.no, "inconsistent list indentation"));
                }
                Some(_) => {}
            }
            let rest = l.text[1..].trim_start();
            if rest.is_empty() {
                return Err(syntax(l.no, "empty list item"));
            }
            if is_item(rest) {
                return Err(syntax(l.no, "nested lists are not supported"));
            }
            items.push((parse_scalar(rest, l.no)?, l.no));
            self.pos += 1;
        }
        Ok(items)
    }

    fn artifacts(&mut self, parent_indent: usize) -> Result<Vec<String>, PipelineError> {
        let mut paths: Option<Vec<String>> = None;
        let mut body_indent = None;
        while let Some(l) = self.peek() {
            if l.indent <= parent_indent {
                break;
            }
            let indent = *body_indent.get_or_insert(l.indent);
            if l.indent != indent || is_item(l.text) {
                return Err(syntax(l.no, "unexpected indentation under `artifacts:`"));
            }
            let (key, value) = split_key(l)?;
            self.pos += 1;
            if key != "paths" {
                return Err(syntax(
                    l.no,
                    format!("unsupported artifacts keyword `{key}`"),
                ));
            }
            if paths.is_some() {
                return Err(syntax(l.no, "duplicate key `paths`"));
            }
            if value.is_some() {
                return Err(syntax(l.no, "`paths:` must be a block list"));
            }
            paths = Some(
                self.block_list(indent)?
                    .into_iter()
                    .map(|(p, _)| p)
                    .collect(),
            );
        }
        Ok(paths.unwrap_or_default())
    }

    fn job(&mut self, name: &str, line: usize) -> Result<ParsedJob, PipelineError> {
        let mut stage: Option<(String, usize)> = None;
        let mut script: Option<(Vec<String>, usize)> = None;
        let mut artifacts: Option<Vec<String>> = None;
        let mut body_indent = None;
        while let Some(l) = self.peek() {
            if l.indent == 0 {
                break;
            }
            let indent = *body_indent.get_or_insert(l.indent);
            if l.indent != indent {
                return Err(syntax(l.no, "unexpected indentation"));
            }
            if is_item(l.text) {
                return Err(syntax(l.no, "unexpected list item"));
            }
            let (key, value) = split_key(l)?;
            self.pos += 1;
            let duplicate = || syntax(l.no, format!("duplicate key `{key}` in job `{name}`"));
            match key {
                "stage" => {
                    if stage.is_some() {
                        return Err(duplicate());
                    }
                    let value = value.ok_or_else(|| syntax(l.no, "`stage:` needs a value"))?;
                    stage = Some((parse_scalar(value, l.no)?, l.no));
                }
                "script" => {
                    if script.is_some() {
                        return Err(duplicate());
                    }
                    if value.is_some() {
                        return Err(syntax(l.no, "`script:` must be a block list"));
                    }
                    let lines = self
                        .block_list(indent)?
                        .into_iter()
                        .map(|(s, _)| s)
                        .collect();
                    script = Some((lines, l.no));
                }
                "artifacts" => {
                    if artifacts.is_some() {
                        return Err(duplicate());
                    }
                    if value.is_some() {
                        return Err(syntax(l.no, "`artifacts:` must be a mapping"));
                    }
                    artifacts = Some(self.artifacts(indent)?);
                }
                other => {
                    return Err(syntax(l.no, format!("unsupported job keyword `{other}`")));
                }
            }
        }
        let (stage, stage_line) =
            stage.ok_or_else(|| syntax(line, format!("job `{name}` is missing `stage:`")))?;
        let (script, script_line) = script.unwrap_or((Vec::new(), line));
        if script.is_empty() {
            return Err(PipelineError::EmptyScript {
                line: script_line,
                job: name.to_string(),
            });
        }
        Ok(ParsedJob {
            job: Job {
                name: name.to_string(),
                stage,
                script,
                artifacts: artifacts.unwrap_or_default(),
            },
            line,
            stage_line,
        })
    }

    fn pipeline(&mut self) -> Result<Pipeline, PipelineError> {
        let mut stages: Option<Vec<String>> = None;
        let mut jobs: Vec<ParsedJob> = Vec::new();
        while let Some(l) = self.peek() {
            if l.indent != 0 {
                return Err(syntax(l.no, "unexpected indentation"));
            }
            if is_item(l.text) {
                return Err(syntax(l.no, "unexpected list item"));
            }
            let (key, value) = split_key(l)?;
            self.pos += 1;
            if key == "stages" {
                if stages.is_some() {
                    return Err(syntax(l.no, "duplicate key `stages`"));
                }
                if value.is_some() {
                    return Err(syntax(l.no, "`stages:` must be a block list"));
                }
                let mut names: Vec<String> = Vec::new();
                for (name, no) in self.block_list(0)? {
                    if names.contains(&name) {
                        return Err(PipelineError::DuplicateStage {
                            line: no,
                            stage: name,
                        });
                    }
                    names.push(name);
                }
                stages = Some(names);
            } else if UNSUPPORTED_TOP_LEVEL.contains(&key) {
                return Err(syntax(
                    l.no,
                    format!("unsupported top-level keyword `{key}`"),
                ));
            } else {
                if key.starts_with('.') {
                    return Err(syntax(l.no, format!("hidden job `{key}` is not supported")));
                }
                if !is_job_name(key) {
                    return Err(syntax(l.no, format!("invalid job name `{key}`")));
                }
                if value.is_some() {
                    return Err(syntax(l.no, format!("job `{key}` must be a mapping")));
                }
                if jobs.iter().any(|j| j.job.name == key) {
                    return Err(PipelineError::DuplicateJob {
                        line: l.no,
                        job: key.to_string(),
                    });
                }
                jobs.push(self.job(key, l.no)?);
            }
        }
        let stages = stages.ok_or_else(|| syntax(1, "missing top-level `stages:` list"))?;
        for parsed in &jobs {
            if !stages.contains(&parsed.job.stage) {
                return Err(PipelineError::UndeclaredStage {
                    line: parsed.stage_line,
                    job: parsed.job.name.clone(),
                    stage: parsed.job.stage.clone(),
                });
            }
        }
        debug_assert!(jobs.iter().all(|j| j.line > 0));
        Ok(Pipeline {
            stages,
            jobs: jobs.into_iter().map(|j| j.job).collect(),
        })
    }
}

/// Parses a CI configuration, preserving stage and job declaration order.
pub fn parse_pipeline(config: &str) -> Result<Pipeline, PipelineError> {
    let mut parser = Parser {
        lines: lex(config)?,
        pos: 0,
    };
    parser.pipeline()
}

fn yaml_special(s: &str) -> bool {
    const WORDS: &[&str] = &["true", "false", "null", "~", "yes", "no", "on", "off"];
    WORDS.iter().any(|w| s.eq_ignore_ascii_case(w)) || s.parse::<f64>().is_ok()
}

fn needs_quotes(s: &str) -> bool {
    let Some(first) = s.chars().next() else {
        return true;
    };
    s != s.trim()
        || s.chars().any(char::is_control)
        || "\"'#[]{}&*!|>%@`,?:".contains(first)
        || s == "-"
        || s.starts_with("- ")
        || s.contains(" #")
        || s.contains(": ")
        || s.ends_with(':')
        || yaml_special(s)
}

fn scalar(s: &str) -> String {
    if !needs_quotes(s) {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\x{:02x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text form; `parse_pipeline` reads it back to an equal model.
pub fn serialize_pipeline(pipeline: &Pipeline) -> String {
    let mut out = String::from("stages:\n");
    for stage in &pipeline.stages {
        let _ = writeln!(out, "  - {}", scalar(stage));
    }
    for job in &pipeline.jobs {
        let _ = writeln!(out, "\n{}:", job.name);
        let _ = writeln!(out, "  stage: {}", scalar(&job.stage));
        out.push_str("  script:\n");
        for line in &job.script {
            let _ = writeln!(out, "    - {}", scalar(line));
        }
        if !job.artifacts.is_empty() {
            out.push_str("  artifacts:\n    paths:\n");
            for path in &job.artifacts {
                let _ = writeln!(out, "      - {}", scalar(path));
            }
        }
    }
    out
}
