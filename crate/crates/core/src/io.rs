//! Plain-text formats: arrangements, covector lists, posets, facet lists.
//!
//! All formats are line based; `#` starts a comment and blank lines are
//! ignored. Parse errors carry 1-based line numbers.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::BigRational;

use crate::arrangement::{from_arrangement, Arrangement};
use crate::error::{Error, Result};
use crate::oriented_matroid::OrientedMatroid;
use crate::poset::Poset;
use crate::sign::SignVector;

/// Non-blank lines with comments removed, paired with their line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
) -> Result<(usize, Vec<&'a str>)> {
    let (ln, line) = lines
        .next()
        .ok_or_else(|| Error::parse(1, format!("missing `{keyword}` header")))?;
    let words: Vec<&str> = line.split_whitespace().collect();
    if words[0] != keyword {
        return Err(Error::parse(
            ln,
            format!("expected `{keyword}` header, found `{}`", words[0]),
        ));
    }
    Ok((ln, words[1..].to_vec()))
}

fn number<T: FromStr>(ln: usize, word: &str, what: &str) -> Result<T> {
    word.parse()
        .map_err(|_| Error::parse(ln, format!("invalid {what} `{word}`")))
}

/// `arr <dim> <n>` followed by `n` rows of `dim` rational entries
/// (`p` or `p/q`).
pub fn parse_arrangement(text: &str) -> Result<Arrangement> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "arr")?;
    let [dim, n] = args.as_slice() else {
        return Err(Error::parse(ln, "expected `arr <dim> <n>`"));
    };
    let dim: usize = number(ln, dim, "dimension")?;
    let n: usize = number(ln, n, "hyperplane count")?;
    let mut normals = Vec::with_capacity(n);
    for (ln, line) in lines {
        if normals.len() == n {
            return Err(Error::parse(ln, format!("more than {n} normals")));
        }
        let row: Vec<BigRational> = line
            .split_whitespace()
            .map(|w| number(ln, w, "rational entry"))
            .collect::<Result<_>>()?;
        if row.len() != dim {
            return Err(Error::parse(
                ln,
                format!("expected {dim} entries, found {}", row.len()),
            ));
        }
        normals.push(row);
    }
    if normals.len() != n {
        return Err(Error::parse(
            text.lines().count().max(1),
            format!("expected {n} normals, found {}", normals.len()),
        ));
    }
    Arrangement::new(dim, normals)
}

pub fn write_arrangement(arr: &Arrangement) -> String {
    let mut out = format!("arr {} {}\n", arr.dim(), arr.len());
    for row in arr.normals() {
        let words: Vec<String> = row.iter().map(ToString::to_string).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}

/// `om <n>` followed by one covector per line over `+ - 0`.
pub fn parse_covectors(text: &str) -> Result<Vec<SignVector>> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "om")?;
    let [n] = args.as_slice() else {
        return Err(Error::parse(ln, "expected `om <n>`"));
    };
    let n: usize = number(ln, n, "ground set size")?;
    let mut out = Vec::new();
    for (ln, line) in lines {
        let s: SignVector = line
            .parse()
            .map_err(|e: Error| Error::parse(ln, e.to_string()))?;
        if s.len() != n {
            return Err(Error::parse(
                ln,
                format!("covector `{line}` has length {}, expected {n}", s.len()),
            ));
        }
        out.push(s);
    }
    if out.is_empty() {
        return Err(Error::parse(ln, "no covectors listed"));
    }
    Ok(out)
}

pub fn write_covectors(covectors: &[SignVector]) -> String {
    let n = covectors.first().map_or(0, SignVector::len);
    let mut out = format!("om {n}\n");
    for s in covectors {
        let _ = writeln!(out, "{s}");
    }
    out
}

/// Either input format, told apart by the header keyword.
#[derive(Clone, Debug)]
pub enum Input {
    Arrangement(Arrangement),
    Covectors(Vec<SignVector>),
}

pub fn parse_input(text: &str) -> Result<Input> {
    let first = content_lines(text).next();
    match first.map(|(_, l)| l.split_whitespace().next().unwrap_or("")) {
        Some("arr") => parse_arrangement(text).map(Input::Arrangement),
        Some("om") => parse_covectors(text).map(Input::Covectors),
        Some(other) => Err(Error::parse(
            first.unwrap().0,
            format!("unknown header `{other}`, expected `arr` or `om`"),
        )),
        None => Err(Error::parse(1, "empty input")),
    }
}

/// Builds the oriented matroid of either input format.
pub fn load_oriented_matroid(text: &str) -> Result<OrientedMatroid> {
    match parse_input(text)? {
        Input::Arrangement(arr) => from_arrangement(&arr),
        Input::Covectors(cands) => OrientedMatroid::from_covectors(&cands),
    }
}

/// `poset <n>`, then `cover <i> <j>` lines, then optional `label <i> <text>`.
pub fn parse_poset(text: &str) -> Result<Poset> {
    let mut lines = content_lines(text);
    let (ln, args) = header(&mut lines, "poset")?;
    let [n] = args.as_slice() else {
        return Err(Error::parse(ln, "expected `poset <n>`"));
    };
    let n: usize = number(ln, n, "element count")?;
    let mut covers = Vec::new();
    let mut labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    for (ln, line) in lines {
        let mut words = line.splitn(3, char::is_whitespace);
        let kind = words.next().unwrap_or("");
        let index = |w: Option<&str>| -> Result<usize> {
            let w = w.ok_or_else(|| Error::parse(ln, "missing element index"))?;
            let i: usize = number(ln, w.trim(), "element index")?;
            if i >= n {
                return Err(Error::parse(ln, format!("element {i} out of range 0..{n}")));
            }
            Ok(i)
        };
        match kind {
            "cover" => {
                let i = index(words.next())?;
                let j = index(words.next())?;
                covers.push((i, j));
            }
            "label" => {
                let i = index(words.next())?;
                labels[i] = words.next().unwrap_or("").trim().to_string();
            }
            other => return Err(Error::parse(ln, format!("unknown directive `{other}`"))),
        }
    }
    Poset::from_covers(n, &covers)
        .map(|p| p.with_labels(labels))
        .map_err(|e| Error::parse(1, e.to_string()))
}

pub fn write_poset(p: &Poset) -> String {
    let mut out = format!("poset {}\n", p.len());
    for (i, j) in p.covers() {
        let _ = writeln!(out, "cover {i} {j}");
    }
    for (i, label) in p.labels().iter().enumerate() {
        let _ = writeln!(out, "label {i} {label}");
    }
    out
}

/// One maximal simplex per line, space separated vertex ids.
pub fn parse_facets(text: &str) -> Result<Vec<Vec<usize>>> {
    content_lines(text)
        .map(|(ln, line)| {
            line.split_whitespace()
                .map(|w| number(ln, w, "vertex id"))
                .collect()
        })
        .collect()
}

pub fn write_facets<T: std::fmt::Display>(facets: &[Vec<T>]) -> String {
    let mut out = String::new();
    for f in facets {
        let words: Vec<String> = f.iter().map(ToString::to_string).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}
