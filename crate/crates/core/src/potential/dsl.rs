//! Text format for potentials.
//!
//! ```text
//! # comments start with '#'
//! left = 0            # V in the incident region (optional, default 0)
//! right = 0.5         # V in the transmitted region (optional, default 0)
//! on [0, 1): 5
//! on [1, 2]: 10*(x - 1)^2 + 0.5
//! ```
//!
//! Alternatively a single built-in line, optionally followed by `left`/`right`:
//!
//! ```text
//! parabola height=10 width=2
//! square height=1 width=1
//! double_barrier height=0.3 barrier=1 well=5
//! arbitrary
//! ```

use super::expr::{self, Expr};
use super::{Potential, Segment, SegmentForm};
use crate::error::{Error, Result};

/// Names accepted as built-in shapes.
pub const BUILTIN_NAMES: [&str; 4] = ["square", "parabola", "double_barrier", "arbitrary"];

struct Line<'a> {
    number: usize,
    text: &'a str,
    /// Character column (1-based) of `text`'s first char in the source line.
    column: usize,
}

fn strip(number: usize, raw: &str) -> Option<Line<'_>> {
    let no_comment = raw.split('#').next().unwrap_or("");
    let trimmed = no_comment.trim_end();
    let text = trimmed.trim_start();
    if text.is_empty() {
        return None;
    }
    let lead = trimmed.chars().count() - text.chars().count();
    Some(Line {
        number,
        text,
        column: lead + 1,
    })
}

/// Parses the potential text format into a validated [`Potential`].
pub fn parse_potential(source: &str) -> Result<Potential> {
    let lines: Vec<Line> = source
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| strip(i + 1, raw))
        .collect();
    let mut v_left = None;
    let mut v_right = None;
    let mut segments = Vec::new();
    let mut builtin: Option<Potential> = None;

    for line in &lines {
        let keyword: String = line
            .text
            .chars()
            .take_while(|c| c.is_alphanumeric() || *c == '_')
            .collect();
        match keyword.as_str() {
            "left" | "right" if is_assignment(line.text, &keyword) => {
                let value = parse_level(line, &keyword)?;
                let slot = if keyword == "left" { &mut v_left } else { &mut v_right };
                if slot.is_some() {
                    return Err(Error::parse(line.number, line.column, format!("`{keyword}` given twice")));
                }
                *slot = Some(value);
            }
            "on" => {
                if builtin.is_some() {
                    return Err(Error::parse(
                        line.number,
                        line.column,
                        "`on` clauses cannot be combined with a built-in shape",
                    ));
                }
                segments.push(parse_clause(line)?);
            }
            name if BUILTIN_NAMES.contains(&name) => {
                if builtin.is_some() || !segments.is_empty() {
                    return Err(Error::parse(
                        line.number,
                        line.column,
                        format!("built-in `{name}` must be the only shape definition"),
                    ));
                }
                builtin = Some(parse_builtin(line, name)?);
            }
            _ => {
                let word = line.text.split_whitespace().next().unwrap_or(line.text);
                return Err(Error::parse(
                    line.number,
                    line.column,
                    format!("unexpected token `{word}` (expected `on`, `left`, `right` or a built-in name)"),
                ));
            }
        }
    }

    let base = match builtin {
        Some(p) => p,
        None if segments.is_empty() => {
            return Err(Error::parse(
                lines.last().map_or(1, |l| l.number),
                1,
                "no segments defined",
            ))
        }
        None => Potential::new(segments, 0.0, 0.0)?,
    };
    let left = v_left.unwrap_or(base.v_left());
    let right = v_right.unwrap_or(base.v_right());
    base.with_exterior(left, right)
}

fn is_assignment(text: &str, keyword: &str) -> bool {
    text[keyword.len()..].trim_start().starts_with('=')
}

fn parse_level(line: &Line, keyword: &str) -> Result<f64> {
    let after = &line.text[keyword.len()..];
    let eq = after.find('=').expect("checked by is_assignment");
    let rest = &after[eq + 1..];
    let column = line.column + keyword.chars().count() + after[..=eq].chars().count();
    let e = expr::parse_at(rest, line.number, column)?;
    constant_value(&e, line, column)
}

fn constant_value(e: &Expr, line: &Line, column: usize) -> Result<f64> {
    let v = e.eval(0.0);
    if e.eval(1.0) != v {
        return Err(Error::parse(line.number, column, "value must not depend on x"));
    }
    if !v.is_finite() {
        return Err(Error::parse(line.number, column, "value is not finite"));
    }
    Ok(v)
}

/// `on [a, b): expr` or `on [a, b]: expr`.
fn parse_clause(line: &Line) -> Result<Segment> {
    let chars: Vec<char> = line.text.chars().collect();
    let err = |offset: usize, msg: String| Error::parse(line.number, line.column + offset, msg);
    let mut i = 2;
    let skip_ws = |i: &mut usize| {
        while *i < chars.len() && chars[*i].is_whitespace() {
            *i += 1;
        }
    };
    skip_ws(&mut i);
    if chars.get(i) != Some(&'[') {
        return Err(err(i, "expected `[` after `on`".into()));
    }
    i += 1;
    let comma = chars[i..]
        .iter()
        .position(|&c| c == ',')
        .map(|p| p + i)
        .ok_or_else(|| err(i, "expected `,` in interval".into()))?;
    let start = parse_bound(&chars[i..comma], line, i)?;
    let close = chars[comma + 1..]
        .iter()
        .position(|&c| c == ')' || c == ']')
        .map(|p| p + comma + 1)
        .ok_or_else(|| err(comma + 1, "expected `)` or `]` closing the interval".into()))?;
    let end = parse_bound(&chars[comma + 1..close], line, comma + 1)?;
    let mut j = close + 1;
    skip_ws(&mut j);
    if chars.get(j) != Some(&':') {
        return Err(err(j, "expected `:` after interval".into()));
    }
    let body: String = chars[j + 1..].iter().collect();
    let e = expr::parse_at(&body, line.number, line.column + j + 1)?;
    let form = match e {
        Expr::Num(v) => SegmentForm::Constant(v),
        other => SegmentForm::Expression(other),
    };
    if !(start < end) {
        return Err(err(1, format!("empty interval [{start}, {end})")));
    }
    Ok(Segment::new(start, end, form))
}

fn parse_bound(chars: &[char], line: &Line, offset: usize) -> Result<f64> {
    let text: String = chars.iter().collect();
    let e = expr::parse_at(&text, line.number, line.column + offset)?;
    constant_value(&e, line, line.column + offset)
}

fn parse_builtin(line: &Line, name: &str) -> Result<Potential> {
    let mut params: Vec<(String, f64, usize)> = Vec::new();
    let mut offset = name.chars().count();
    for word in line.text[name.len()..].split_whitespace() {
        let word_offset = line.text[offset..].find(word).map_or(offset, |p| p + offset);
        offset = word_offset + word.len();
        let column = line.column + line.text[..word_offset].chars().count();
        let Some((key, value)) = word.split_once('=') else {
            return Err(Error::parse(line.number, column, format!("expected key=value, found `{word}`")));
        };
        let v: f64 = value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::parse(line.number, column, format!("invalid number `{value}`")))?;
        params.push((key.to_string(), v, column));
    }
    let allowed: &[&str] = match name {
        "square" => &["height", "width"],
        "parabola" => &["height", "width"],
        "double_barrier" => &["height", "barrier", "well"],
        _ => &[],
    };
    for (key, _, column) in &params {
        if !allowed.contains(&key.as_str()) && key != "left" && key != "right" {
            return Err(Error::parse(line.number, *column, format!("unknown parameter `{key}` for `{name}`")));
        }
    }
    let get = |key: &str, default: f64| {
        params
            .iter()
            .find(|(k, _, _)| k == key)
            .map_or(default, |(_, v, _)| *v)
    };
    let shape = match name {
        "square" => Potential::square(get("height", 1.0), get("width", 1.0)),
        "parabola" => Potential::parabola(get("height", 10.0), get("width", 2.0)),
        "double_barrier" => Potential::double_barrier(get("height", 0.3), get("barrier", 1.0), get("well", 5.0)),
        _ => Ok(Potential::arbitrary()),
    }?;
    let (left, right) = (get("left", shape.v_left()), get("right", shape.v_right()));
    shape.with_exterior(left, right)
}

/// Canonical text form; parsing it back reproduces the same V(x).
pub fn render_potential(p: &Potential) -> String {
    let mut out = format!("left = {:?}\nright = {:?}\n", p.v_left(), p.v_right());
    let count = p.segments().len();
    for (i, s) in p.segments().iter().enumerate() {
        let close = if i + 1 == count { ']' } else { ')' };
        let body = match &s.form {
            SegmentForm::Constant(v) => format!("{v:?}"),
            other => other.to_expr().to_string(),
        };
        out.push_str(&format!("on [{:?}, {:?}{close}: {body}\n", s.start, s.end));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parabola() {
        let p = parse_potential("parabola height=10 width=2").unwrap();
        assert_eq!(p.length(), 2.0);
        assert_eq!(p.evaluate(1.0).unwrap(), 0.0);
        assert_eq!(p.evaluate(0.5).unwrap(), 2.5);
        assert_eq!(p.evaluate(0.0).unwrap(), 10.0);
    }

    #[test]
    fn constant_clause() {
        let p = parse_potential("on [0,1): 5").unwrap();
        assert_eq!(p.length(), 1.0);
        assert_eq!(p.evaluate(0.5).unwrap(), 5.0);
    }

    #[test]
    fn bad_token_is_named() {
        match parse_potential("on [0,1): x^2 + bad") {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, 1);
                assert_eq!(column, 17);
                assert!(message.contains("`bad`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multi_line_with_levels() {
        let src = "# a step and a ramp\nleft = 0\nright = 0.25\n\non [0, 1): 2\non [1, 2]: 2 - (x - 1)  # ramp\n";
        let p = parse_potential(src).unwrap();
        assert_eq!(p.v_right(), 0.25);
        assert_eq!(p.evaluate(1.5).unwrap(), 1.5);
        assert_eq!(p.segments().len(), 2);
    }

    #[test]
    fn coverage_and_syntax_errors() {
        assert!(matches!(parse_potential("on [0,1): 1\non [1.5,2): 1"), Err(Error::Coverage(_))));
        assert!(matches!(parse_potential("on [0,1): 1\non [0.5,2): 1"), Err(Error::Coverage(_))));
        assert!(matches!(parse_potential("on [0,1 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("on 0,1): 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("on [0,1) 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("wiggle"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_potential("# nothing\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("square height=x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("square depth=1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_potential("left = x\non [0,1): 1"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_potential("parabola\non [0,1): 1"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_potential("on [0,1): 1/(x-0.5)"), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn builtin_levels() {
        let p = parse_potential("square height=1 width=1 right=0.5").unwrap();
        assert_eq!(p.v_right(), 0.5);
        let p = parse_potential("arbitrary\nleft = 0.1").unwrap();
        assert_eq!(p.v_left(), 0.1);
        let p = parse_potential("double_barrier height=0.3 barrier=1 well=5").unwrap();
        assert_eq!(p.length(), 7.0);
    }

    #[test]
    fn render_is_canonical() {
        let p = parse_potential("right = 0.5\non [0, 1): 3\non [1, 2]: x^2").unwrap();
        let text = render_potential(&p);
        assert_eq!(
            text,
            "left = 0.0\nright = 0.5\non [0.0, 1.0): 3.0\non [1.0, 2.0]: (x ^ 2.0)\n"
        );
        assert_eq!(parse_potential(&text).unwrap(), p);
    }
}
