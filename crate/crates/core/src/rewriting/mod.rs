//! Generic engine for finitely presented semigroups-with-zero and groups:
//! consequence enumeration, finite-quotient enumeration, McKinsey's
//! interleaved decision procedure and van Kampen area search.

mod derive;
mod mckinsey;
mod quotients;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use derive::{apply_step, area, derive_consequences, replay, AnyWord, Area, Consequences, DerivationStep, Search};
pub use mckinsey::{mckinsey_decide, Certificate, McKinsey, McKinseyOptions};
pub use quotients::{
    check_associative, enumerate_finite_quotients, light_associative, max_quotient_cap, semigroup_tables, FiniteStructure,
    QuotientStream, DEFAULT_GROUP_CAP, DEFAULT_SEMIGROUP_CAP,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("quotient size cap {cap} exceeds the configured maximum {max}")]
    CapTooLarge { cap: usize, max: usize },
    #[error("wrong presentation kind: {0}")]
    WrongKind(String),
}

pub type Result<T> = std::result::Result<T, RewriteError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Semigroup,
    Group,
}

/// Element of a free semigroup with an adjoined zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SWord {
    Zero,
    Word(Vec<usize>),
}

impl SWord {
    pub fn word(w: &[usize]) -> Self {
        SWord::Word(w.to_vec())
    }

    pub fn len(&self) -> usize {
        match self {
            SWord::Zero => 0,
            SWord::Word(w) => w.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Group word: letter `i + 1` is generator `i`, `-(i + 1)` its inverse.
pub type GWord = Vec<i32>;

pub fn free_reduce(w: &[i32]) -> GWord {
    let mut out: GWord = Vec::with_capacity(w.len());
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn inverse(w: &[i32]) -> GWord {
    w.iter().rev().map(|x| -x).collect()
}

pub fn concat(a: &[i32], b: &[i32]) -> GWord {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    free_reduce(&v)
}

/// `[a, b] = a^-1 b^-1 a b`.
pub fn commutator(a: &[i32], b: &[i32]) -> GWord {
    let mut v = inverse(a);
    v.extend(inverse(b));
    v.extend_from_slice(a);
    v.extend_from_slice(b);
    free_reduce(&v)
}

pub fn power(a: &[i32], n: i64) -> GWord {
    let base = if n < 0 { inverse(a) } else { a.to_vec() };
    let mut v = Vec::new();
    for _ in 0..n.unsigned_abs() {
        v.extend_from_slice(&base);
    }
    free_reduce(&v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub kind: Kind,
    pub generators: Vec<String>,
    /// Semigroup relations `l = r`; either side may be the zero.
    pub relations: Vec<(SWord, SWord)>,
    /// Group relators, freely reduced.
    pub relators: Vec<GWord>,
}

impl Presentation {
    pub fn semigroup(generators: &[&str], relations: Vec<(SWord, SWord)>) -> Self {
        Presentation {
            kind: Kind::Semigroup,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relations,
            relators: vec![],
        }
    }

    pub fn group(generators: &[&str], relators: Vec<GWord>) -> Self {
        Presentation {
            kind: Kind::Group,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            relations: vec![],
            relators: relators.into_iter().map(|r| free_reduce(&r)).collect(),
        }
    }

    pub fn gen(&self, name: &str) -> Result<usize> {
        self.generators.iter().position(|g| g == name).ok_or_else(|| RewriteError::UnknownGenerator(name.to_string()))
    }

    /// Parse a semigroup word: `a.b^2.c`, `a b^2 c`, or `0`.
    pub fn parse_sword(&self, s: &str) -> Result<SWord> {
        let s = s.trim();
        if s == "0" {
            return Ok(SWord::Zero);
        }
        let mut w = Vec::new();
        for tok in s.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (name, exp) = split_power(tok)?;
            if exp < 0 {
                return Err(RewriteError::Parse { line: 0, msg: format!("negative power `{}` in a semigroup word", tok) });
            }
            let g = self.gen(name)?;
            w.extend(std::iter::repeat(g).take(exp as usize));
        }
        Ok(SWord::Word(w))
    }

    /// Parse a group word: products of `x`, `x^-1`, `x^3`, `1`, and
    /// commutators `[u,v]` of such words.
    pub fn parse_gword(&self, s: &str) -> Result<GWord> {
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let w = self.parse_gproduct(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(RewriteError::Parse { line: 0, msg: format!("unexpected `{}` in `{}`", chars[pos], s) });
        }
        Ok(free_reduce(&w))
    }

    fn parse_gproduct(&self, c: &[char], pos: &mut usize) -> Result<GWord> {
        let mut out = Vec::new();
        loop {
            while *pos < c.len() && (c[*pos] == '.' || c[*pos].is_whitespace() || c[*pos] == '*') {
                *pos += 1;
            }
            if *pos >= c.len() || c[*pos] == ',' || c[*pos] == ']' {
                return Ok(out);
            }
            let factor = if c[*pos] == '[' {
                *pos += 1;
                let a = self.parse_gproduct(c, pos)?;
                if c.get(*pos) != Some(&',') {
                    return Err(RewriteError::Parse { line: 0, msg: "expected `,` in commutator".into() });
                }
                *pos += 1;
                let b = self.parse_gproduct(c, pos)?;
                if c.get(*pos) != Some(&']') {
                    return Err(RewriteError::Parse { line: 0, msg: "expected `]`".into() });
                }
                *pos += 1;
                commutator(&a, &b)
            } else {
                let start = *pos;
                while *pos < c.len() && (c[*pos].is_alphanumeric() || c[*pos] == '_' || c[*pos] == '\'') {
                    *pos += 1;
                }
                if start == *pos {
                    return Err(RewriteError::Parse { line: 0, msg: format!("unexpected `{}`", c[*pos]) });
                }
                let name: String = c[start..*pos].iter().collect();
                if name == "1" {
                    vec![]
                } else {
                    vec![self.gen(&name)? as i32 + 1]
                }
            };
            let mut exp = 1i64;
            if c.get(*pos) == Some(&'^') {
                *pos += 1;
                let start = *pos;
                if c.get(*pos) == Some(&'-') {
                    *pos += 1;
                }
                while *pos < c.len() && c[*pos].is_ascii_digit() {
                    *pos += 1;
                }
                let t: String = c[start..*pos].iter().collect();
                exp = t.parse().map_err(|_| RewriteError::Parse { line: 0, msg: format!("bad exponent `{}`", t) })?;
            }
            out.extend(power(&factor, exp));
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut p: Option<Presentation> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| RewriteError::Parse { line: ln + 1, msg };
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match head {
                "semigroup" => p = Some(Presentation::semigroup(&[], vec![])),
                "group" => p = Some(Presentation::group(&[], vec![])),
                "gen" => {
                    let pr = p.as_mut().ok_or_else(|| err("missing header".into()))?;
                    pr.generators.extend(rest.split_whitespace().map(|s| s.to_string()));
                }
                "rel" => {
                    let pr = p.as_mut().ok_or_else(|| err("missing header".into()))?;
                    match pr.kind {
                        Kind::Semigroup => {
                            let (l, r) = rest.split_once('=').ok_or_else(|| err("expected `l = r`".into()))?;
                            let l = pr.parse_sword(l).map_err(|e| err(e.to_string()))?;
                            let r = pr.parse_sword(r).map_err(|e| err(e.to_string()))?;
                            pr.relations.push((l, r));
                        }
                        Kind::Group => {
                            let r = match rest.split_once('=') {
                                Some((l, r)) => {
                                    let l = pr.parse_gword(l).map_err(|e| err(e.to_string()))?;
                                    let r = pr.parse_gword(r).map_err(|e| err(e.to_string()))?;
                                    concat(&l, &inverse(&r))
                                }
                                None => pr.parse_gword(rest).map_err(|e| err(e.to_string()))?,
                            };
                            pr.relators.push(r);
                        }
                    }
                }
                other => return Err(err(format!("unknown directive `{}`", other))),
            }
        }
        p.ok_or(RewriteError::Parse { line: 1, msg: "empty presentation".into() })
    }

    pub fn sword_text(&self, w: &SWord) -> String {
        match w {
            SWord::Zero => "0".into(),
            SWord::Word(v) if v.is_empty() => "1".into(),
            SWord::Word(v) => run_length(v.iter().map(|&g| (g, 1))).map(|(g, e)| power_text(&self.generators[g], e)).collect::<Vec<_>>().join("."),
        }
    }

    pub fn gword_text(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        run_length(w.iter().map(|&x| ((x.unsigned_abs() - 1) as usize, x.signum() as i64)))
            .map(|(g, e)| power_text(&self.generators[g], e))
            .collect::<Vec<_>>()
            .join(".")
    }

    pub fn to_text(&self) -> String {
        let mut s = match self.kind {
            Kind::Semigroup => "semigroup\n".to_string(),
            Kind::Group => "group\n".to_string(),
        };
        s.push_str(&format!("gen {}\n", self.generators.join(" ")));
        for (l, r) in &self.relations {
            s.push_str(&format!("rel {} = {}\n", self.sword_text(l), self.sword_text(r)));
        }
        for r in &self.relators {
            s.push_str(&format!("rel {}\n", self.gword_text(r)));
        }
        s
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn split_power(tok: &str) -> Result<(&str, i64)> {
    match tok.split_once('^') {
        None => Ok((tok, 1)),
        Some((n, e)) => Ok((n, e.parse().map_err(|_| RewriteError::Parse { line: 0, msg: format!("bad exponent in `{}`", tok) })?)),
    }
}

fn power_text(name: &str, e: i64) -> String {
    if e == 1 {
        name.to_string()
    } else {
        format!("{}^{}", name, e)
    }
}

/// Merge consecutive equal generators with same-sign exponents.
fn run_length(it: impl Iterator<Item = (usize, i64)>) -> impl Iterator<Item = (usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for (g, e) in it {
        match out.last_mut() {
            Some((h, f)) if *h == g && f.signum() == e.signum() => *f += e,
            _ => out.push((g, e)),
        }
    }
    out.into_iter()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Presentation::parse("group\ngen x y\nrel [x,y]\nrel x^3\n").unwrap();
        assert_eq!(p.relators[0], vec![-1, -2, 1, 2]);
        assert_eq!(p.relators[1], vec![1, 1, 1]);
        assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
        let s = Presentation::parse("semigroup\ngen a b\nrel a.b = b.a\nrel a^3 = 0\n").unwrap();
        assert_eq!(s.relations[1], (SWord::word(&[0, 0, 0]), SWord::Zero));
        assert_eq!(Presentation::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 1]), vec![1]);
        assert_eq!(commutator(&[1, 1], &[2, 2]), vec![-1, -1, -2, -2, 1, 1, 2, 2]);
    }
}
