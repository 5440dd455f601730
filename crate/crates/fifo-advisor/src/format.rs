// SPDX-License-Identifier: Apache-2.0

//! Line-oriented trace files.
//!
//! ```text
//! trace-format 1
//! program write_then_read
//! fifo 0 x width=32
//! fifo 1 y width=32 depth=64 group=lanes
//! task 0 producer
//!   w 0
//!   c 3
//! end
//! task 1 consumer
//!   r 0
//! end
//! ```
//!
//! `#` starts a comment. Inside a task, `c <cycles>` computes, `r <fifo>`
//! reads and `w <fifo>` writes. Indentation is optional.

use std::fmt::Write as _;

use fifo_advisor_core::trace::ValidationError;
use fifo_advisor_core::{Event, FifoDecl, TaskTrace, TraceProgram};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

const DEFAULT_PROGRAM_NAME: &str = "trace";

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, what: &str, text: &str) -> Result<T, ParseError> {
    text.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{text}`")))
}

struct OpenTask {
    id: usize,
    name: String,
    events: Vec<Event>,
    line: usize,
}

/// Parses and validates a trace file.
pub fn parse_trace(text: &str) -> Result<TraceProgram, ParseError> {
    let mut header_seen = false;
    let mut name: Option<String> = None;
    let mut fifos = Vec::new();
    let mut tasks = Vec::new();
    let mut open: Option<OpenTask> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();

        if !header_seen {
            match words.as_slice() {
                ["trace-format", v] if *v == FORMAT_VERSION.to_string() => {
                    header_seen = true;
                    continue;
                }
                ["trace-format", v] => {
                    return Err(syntax(line, format!("unsupported trace-format version `{v}`")))
                }
                _ => return Err(syntax(line, "expected `trace-format 1` header")),
            }
        }

        if let Some(task) = open.as_mut() {
            let event = match words.as_slice() {
                ["end"] => None,
                ["c", n] => Some(Event::Compute(number(line, "a cycle count", n)?)),
                ["r", f] => Some(Event::Read(number(line, "a fifo id", f)?)),
                ["w", f] => Some(Event::Write(number(line, "a fifo id", f)?)),
                [op, ..] if ["c", "r", "w"].contains(op) => {
                    return Err(syntax(line, format!("`{op}` takes exactly one argument")))
                }
                [other, ..] => {
                    return Err(syntax(
                        line,
                        format!("unexpected `{other}` inside task `{}`; missing `end`?", task.name),
                    ))
                }
                [] => unreachable!(),
            };
            match event {
                Some(e) => task.events.push(e),
                None => {
                    let t = open.take().expect("open task");
                    tasks.push(TaskTrace::new(t.id, t.name, t.events));
                }
            }
            continue;
        }

        match words.as_slice() {
            ["program", n] => {
                if name.is_some() {
                    return Err(syntax(line, "duplicate `program` statement"));
                }
                name = Some((*n).to_string());
            }
            ["fifo", id, fifo_name, attrs @ ..] => {
                fifos.push(parse_fifo(line, id, fifo_name, attrs)?);
            }
            ["task", id, task_name] => {
                open = Some(OpenTask {
                    id: number(line, "a task id", id)?,
                    name: (*task_name).to_string(),
                    events: Vec::new(),
                    line,
                });
            }
            ["trace-format", ..] => return Err(syntax(line, "duplicate `trace-format` header")),
            ["end"] => return Err(syntax(line, "`end` without a matching `task`")),
            ["c" | "r" | "w", ..] => return Err(syntax(line, "operation outside of a task")),
            [keyword, ..] => {
                return Err(syntax(
                    line,
                    format!("unknown or malformed statement `{keyword}`"),
                ))
            }
            [] => unreachable!(),
        }
    }

    if !header_seen {
        return Err(syntax(1, "expected `trace-format 1` header"));
    }
    if let Some(t) = open {
        return Err(syntax(t.line, format!("task `{}` is never closed with `end`", t.name)));
    }
    let name = name.unwrap_or_else(|| DEFAULT_PROGRAM_NAME.to_string());
    Ok(TraceProgram::new(name, fifos, tasks)?)
}

fn parse_fifo(line: usize, id: &str, name: &str, attrs: &[&str]) -> Result<FifoDecl, ParseError> {
    let id = number(line, "a fifo id", id)?;
    let mut width = None;
    let mut depth = None;
    let mut group = None;
    for attr in attrs {
        let (key, value) = attr
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected key=value, found `{attr}`")))?;
        let slot_taken = match key {
            "width" => width.replace(number::<u32>(line, "a bit-width", value)?).is_some(),
            "depth" => depth.replace(number::<u32>(line, "a depth", value)?).is_some(),
            "group" if !value.is_empty() => group.replace(value.to_string()).is_some(),
            "group" => return Err(syntax(line, "empty group name")),
            _ => return Err(syntax(line, format!("unknown fifo attribute `{key}`"))),
        };
        if slot_taken {
            return Err(syntax(line, format!("attribute `{key}` given twice")));
        }
    }
    let width = width.ok_or_else(|| syntax(line, format!("fifo `{name}` is missing width=")))?;
    let mut decl = FifoDecl::new(id, name, width);
    decl.declared_depth = depth;
    decl.group = group;
    Ok(decl)
}

/// Renders a program in the trace format; [`parse_trace`] reads it back to
/// an equal program.
pub fn write_trace(program: &TraceProgram) -> String {
    let mut out = String::new();
    writeln!(out, "trace-format {FORMAT_VERSION}").unwrap();
    writeln!(out, "program {}", program.name()).unwrap();
    for f in program.fifos() {
        write!(out, "fifo {} {} width={}", f.id, f.name, f.width).unwrap();
        if let Some(d) = f.declared_depth {
            write!(out, " depth={d}").unwrap();
        }
        if let Some(g) = &f.group {
            write!(out, " group={g}").unwrap();
        }
        out.push('\n');
    }
    for t in program.tasks() {
        writeln!(out, "task {} {}", t.id, t.name).unwrap();
        for e in &t.events {
            match e {
                Event::Compute(n) => writeln!(out, "  c {n}"),
                Event::Read(f) => writeln!(out, "  r {f}"),
                Event::Write(f) => writeln!(out, "  w {f}"),
            }
            .unwrap();
        }
        out.push_str("end\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(err: ParseError) -> usize {
        match err {
            ParseError::Syntax { line, .. } => line,
            other => panic!("expected a syntax error, got {other}"),
        }
    }

    #[test]
    fn empty_program() {
        let p = parse_trace("trace-format 1\n").unwrap();
        assert_eq!((p.task_count(), p.fifo_count()), (0, 0));
        assert_eq!(p.name(), "trace");
    }

    #[test]
    fn attributes_and_comments() {
        let text = "# header comment\ntrace-format 1\nprogram demo\n\
                    fifo 0 a width=8 group=g depth=16 # trailing\n\
                    task 0 p\n  w 0\n  c 0\nend\ntask 1 q\n    r 0\nend\n";
        let p = parse_trace(text).unwrap();
        let f = &p.fifos()[0];
        assert_eq!((f.width, f.declared_depth, f.group.as_deref()), (8, Some(16), Some("g")));
        assert_eq!(p.tasks()[0].events, vec![Event::Write(0), Event::Compute(0)]);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("fifo 0 a width=8\n", 1),
            ("trace-format 2\n", 1),
            ("trace-format 1\nfifo 0 a\n", 2),
            ("trace-format 1\nfifo 0 a width=x\n", 2),
            ("trace-format 1\nfifo 0 a width=8 width=9\n", 2),
            ("trace-format 1\nfifo 0 a width=8 colour=red\n", 2),
            ("trace-format 1\n\ntask 0 p\n  w\nend\n", 4),
            ("trace-format 1\ntask 0 p\n  x 1\nend\n", 3),
            ("trace-format 1\nw 0\n", 2),
            ("trace-format 1\nend\n", 2),
            ("trace-format 1\ntask 0 p\n  c 1\n", 2),
            ("trace-format 1\nprogram a\nprogram b\n", 3),
            ("trace-format 1\ntask 0 p\n  c -1\nend\n", 3),
            ("", 1),
        ];
        for (text, line) in cases {
            assert_eq!(line_of(parse_trace(text).unwrap_err()), line, "{text:?}");
        }
    }

    #[test]
    fn semantic_errors_pass_through() {
        let text = "trace-format 1\nfifo 0 z width=8\ntask 0 p\n  w 0\n  w 0\n  w 0\nend\n\
                    task 1 c\n  r 0\n  r 0\n  r 0\n  r 0\n  r 0\nend\n";
        let err = parse_trace(text).unwrap_err();
        assert!(matches!(err, ParseError::Invalid(_)));
        assert!(err.to_string().contains("`z`: reads exceed writes"), "{err}");
    }

    #[test]
    fn writer_output_parses_back() {
        let text = "trace-format 1\nprogram demo\nfifo 0 a width=8 depth=16 group=g\n\
                    task 0 p\n  w 0\n  c 4\nend\ntask 1 q\n  r 0\nend\n";
        let p = parse_trace(text).unwrap();
        assert_eq!(write_trace(&p), text);
    }
}
