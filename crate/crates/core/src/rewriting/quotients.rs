use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::derive::AnyWord;
use super::{Kind, Presentation, Result, RewriteError, SWord};

/// A finite semigroup or permutation group with images of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FiniteStructure {
    Semigroup {
        table: Vec<Vec<usize>>,
        zero: Option<usize>,
        assignment: Vec<usize>,
    },
    Group {
        degree: usize,
        /// Image of generator i as a permutation of 0..degree.
        perms: Vec<Vec<usize>>,
    },
}

pub const DEFAULT_SEMIGROUP_CAP: usize = 5;
pub const DEFAULT_GROUP_CAP: usize = 6;

/// Largest size cap accepted by [`enumerate_finite_quotients`]; the
/// `FORGE_MAX_QUOTIENT_CAP` environment variable overrides the default.
pub fn max_quotient_cap(kind: Kind) -> usize {
    if let Some(v) = std::env::var("FORGE_MAX_QUOTIENT_CAP").ok().and_then(|v| v.parse().ok()) {
        return v;
    }
    match kind {
        Kind::Semigroup => DEFAULT_SEMIGROUP_CAP,
        Kind::Group => DEFAULT_GROUP_CAP,
    }
}

/// Exhaustive associativity check.
pub fn check_associative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
}

/// Light's test: associativity holds iff `(x g) y = x (g y)` for every `g`
/// in a generating set.
pub fn light_associative(t: &[Vec<usize>], gens: &[usize]) -> bool {
    let n = t.len();
    gens.iter().all(|&g| (0..n).all(|x| (0..n).all(|y| t[t[x][g]][y] == t[x][t[g][y]])))
}

fn zero_of(t: &[Vec<usize>]) -> Option<usize> {
    let n = t.len();
    (0..n).find(|&z| (0..n).all(|x| t[z][x] == z && t[x][z] == z))
}

impl FiniteStructure {
    pub fn size(&self) -> usize {
        match self {
            FiniteStructure::Semigroup { table, .. } => table.len(),
            FiniteStructure::Group { perms, degree } => group_order(perms, *degree),
        }
    }

    /// Image of a semigroup word; `None` for the zero when the structure has none.
    pub fn eval_sword(&self, w: &SWord) -> Option<usize> {
        let FiniteStructure::Semigroup { table, zero, assignment } = self else { return None };
        match w {
            SWord::Zero => *zero,
            SWord::Word(v) => {
                let mut it = v.iter().map(|&g| assignment[g]);
                let first = it.next()?;
                Some(it.fold(first, |acc, x| table[acc][x]))
            }
        }
    }

    pub fn eval_gword(&self, w: &[i32]) -> Option<Vec<usize>> {
        let FiniteStructure::Group { degree, perms } = self else { return None };
        let mut cur: Vec<usize> = (0..*degree).collect();
        for &x in w {
            let p = &perms[(x.unsigned_abs() - 1) as usize];
            let p = if x > 0 { p.clone() } else { invert(p) };
            // act on the right: point i goes to p[cur[i]]
            cur = cur.iter().map(|&i| p[i]).collect();
        }
        Some(cur)
    }

    pub fn eval(&self, w: &AnyWord) -> Option<Vec<usize>> {
        match w {
            AnyWord::S(s) => self.eval_sword(s).map(|x| vec![x]),
            AnyWord::G(g) => self.eval_gword(g),
        }
    }

    pub fn separates(&self, a: &AnyWord, b: &AnyWord) -> bool {
        match (self.eval(a), self.eval(b)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        }
    }

    /// Full check: structure axioms and every relation of `pres`.
    pub fn verify(&self, pres: &Presentation) -> std::result::Result<(), String> {
        match self {
            FiniteStructure::Semigroup { table, zero, assignment } => {
                let n = table.len();
                if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
                    return Err("table is not square or has out-of-range entries".into());
                }
                let ok = if n <= 64 { check_associative(table) } else { light_associative(table, assignment) };
                if !ok {
                    return Err("table is not associative".into());
                }
                if let Some(z) = zero {
                    if (0..n).any(|x| table[*z][x] != *z || table[x][*z] != *z) {
                        return Err("zero is not absorbing".into());
                    }
                }
                if assignment.len() != pres.generators.len() || assignment.iter().any(|&a| a >= n) {
                    return Err("bad generator assignment".into());
                }
                for (i, (l, r)) in pres.relations.iter().enumerate() {
                    let (a, b) = (self.eval_sword(l), self.eval_sword(r));
                    if a.is_none() || a != b {
                        return Err(format!("relation {} fails", i));
                    }
                }
                Ok(())
            }
            FiniteStructure::Group { degree, perms } => {
                if perms.len() != pres.generators.len() {
                    return Err("bad generator assignment".into());
                }
                for p in perms {
                    let mut seen = vec![false; *degree];
                    if p.len() != *degree || p.iter().any(|&x| x >= *degree || std::mem::replace(&mut seen[x], true)) {
                        return Err("not a permutation".into());
                    }
                }
                let id: Vec<usize> = (0..*degree).collect();
                for (i, r) in pres.relators.iter().enumerate() {
                    if self.eval_gword(r).as_ref() != Some(&id) {
                        return Err(format!("relator {} fails", i));
                    }
                }
                Ok(())
            }
        }
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut q = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        q[x] = i;
    }
    q
}

fn group_order(perms: &[Vec<usize>], degree: usize) -> usize {
    let id: Vec<usize> = (0..degree).collect();
    let mut seen = std::collections::HashSet::new();
    seen.insert(id.clone());
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for p in perms {
            let y: Vec<usize> = x.iter().map(|&i| p[i]).collect();
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    seen.len()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

// Lexicographically least relabelling check.
fn is_canonical(t: &[u8], n: usize, perms: &[Vec<usize>]) -> bool {
    for p in perms {
        let inv = invert(p);
        for x in 0..n * n {
            let (i, j) = (x / n, x % n);
            let img = p[t[inv[i] * n + inv[j]] as usize] as u8;
            if img < t[x] {
                return false;
            }
            if img > t[x] {
                break;
            }
        }
    }
    true
}

fn generate_tables(n: usize) -> Vec<Vec<Vec<usize>>> {
    let perms = permutations(n);
    let mut out = Vec::new();
    let mut t = vec![u8::MAX; n * n];
    fn consistent(t: &[u8], n: usize) -> bool {
        let get = |a: usize, b: usize| t[a * n + b];
        for a in 0..n {
            for b in 0..n {
                let ab = get(a, b);
                if ab == u8::MAX {
                    continue;
                }
                for c in 0..n {
                    let bc = get(b, c);
                    if bc == u8::MAX {
                        continue;
                    }
                    let l = get(ab as usize, c);
                    let r = get(a, bc as usize);
                    if l != u8::MAX && r != u8::MAX && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn rec(k: usize, t: &mut Vec<u8>, n: usize, perms: &[Vec<usize>], out: &mut Vec<Vec<Vec<usize>>>) {
        if k == n * n {
            if is_canonical(t, n, perms) {
                out.push(t.chunks(n).map(|r| r.iter().map(|&x| x as usize).collect()).collect());
            }
            return;
        }
        for v in 0..n as u8 {
            t[k] = v;
            if consistent(t, n) {
                rec(k + 1, t, n, perms, out);
            }
        }
        t[k] = u8::MAX;
    }
    rec(0, &mut t, n, &perms, &mut out);
    out
}

/// All semigroups of order `n` up to isomorphism (cached).
pub fn semigroup_tables(n: usize) -> &'static [Vec<Vec<usize>>] {
    static CACHE: [OnceLock<Vec<Vec<Vec<usize>>>>; 7] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    assert!(n >= 1 && n < CACHE.len(), "semigroup tables are only enumerated up to order 6");
    CACHE[n].get_or_init(|| generate_tables(n))
}

pub type QuotientStream<'a> = Box<dyn Iterator<Item = FiniteStructure> + 'a>;

/// Homomorphisms into finite structures of size at most `cap` satisfying
/// every relation, smallest first. Semigroup tables are taken up to
/// isomorphism; group images are permutation representations of degree
/// at most `cap`.
pub fn enumerate_finite_quotients(pres: &Presentation, cap: usize) -> Result<QuotientStream<'_>> {
    let max = max_quotient_cap(pres.kind);
    if cap > max {
        return Err(RewriteError::CapTooLarge { cap, max });
    }
    let g = pres.generators.len();
    match pres.kind {
        Kind::Semigroup => {
            let uses_zero = pres.relations.iter().any(|(l, r)| *l == SWord::Zero || *r == SWord::Zero);
            let it = (1..=cap).flat_map(move |n| {
                semigroup_tables(n).iter().flat_map(move |table| {
                    let zero = zero_of(table);
                    let total = (n as u64).pow(g as u32);
                    let skip = uses_zero && zero.is_none();
                    (0..if skip { 0 } else { total }).filter_map(move |code| {
                        let mut c = code;
                        let assignment: Vec<usize> = (0..g)
                            .map(|_| {
                                let x = (c % n as u64) as usize;
                                c /= n as u64;
                                x
                            })
                            .collect();
                        let s = FiniteStructure::Semigroup { table: table.clone(), zero, assignment };
                        let ok = pres.relations.iter().all(|(l, r)| {
                            let a = s.eval_sword(l);
                            a.is_some() && a == s.eval_sword(r)
                        });
                        ok.then_some(s)
                    })
                })
            });
            Ok(Box::new(it))
        }
        Kind::Group => {
            let it = (1..=cap).flat_map(move |d| {
                let perms = permutations(d);
                let count = perms.len() as u64;
                let total = count.pow(g as u32);
                (0..total).filter_map(move |code| {
                    let mut c = code;
                    let images: Vec<Vec<usize>> = (0..g)
                        .map(|_| {
                            let x = (c % count) as usize;
                            c /= count;
                            perms[x].clone()
                        })
                        .collect();
                    let s = FiniteStructure::Group { degree: d, perms: images };
                    let id: Vec<usize> = (0..d).collect();
                    pres.relators.iter().all(|r| s.eval_gword(r).as_ref() == Some(&id)).then_some(s)
                })
            });
            Ok(Box::new(it))
        }
    }
}
