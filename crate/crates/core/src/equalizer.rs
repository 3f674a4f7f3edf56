//! Equalizer subgroups `E(G, N) = {(u, v) : u = v in G}` of `F(X) × F(X)`
//! for `G = F(X)/N`: the finite generating set, membership, expressions of
//! `(w, 1)` in the generators, distortion tables, and finite-quotient
//! separation of pairs outside `E`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{separate_element, GroupError, GroupPresentationData, Model, TCertificate};
use crate::rewriting::{
    area, enumerate_finite_quotients, free_reduce, inverse, mckinsey_decide, AnyWord, Area, FiniteStructure, GWord, Kind,
    McKinseyOptions, Presentation, RewriteError,
};
use crate::Tri;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EqualizerError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("needs a group presentation")]
    NotGroup,
    #[error("{0} is not in the normal closure of the relators")]
    NotInNormalClosure(String),
    #[error("undecided within the budget: {0}")]
    Unknown(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, EqualizerError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairWord {
    pub u: GWord,
    pub v: GWord,
}

impl PairWord {
    pub fn new(u: &[i32], v: &[i32]) -> Self {
        PairWord { u: free_reduce(u), v: free_reduce(v) }
    }

    pub fn one() -> Self {
        PairWord { u: vec![], v: vec![] }
    }

    pub fn mul(&self, other: &PairWord) -> PairWord {
        PairWord::new(&[&self.u[..], &other.u].concat(), &[&self.v[..], &other.v].concat())
    }

    pub fn inverse(&self) -> PairWord {
        PairWord { u: inverse(&self.u), v: inverse(&self.v) }
    }

    /// Parse `(u ; v)`.
    pub fn parse(pres: &Presentation, s: &str) -> Result<Self> {
        let body = s.trim().strip_prefix('(').and_then(|b| b.strip_suffix(')')).ok_or_else(|| EqualizerError::Parse(format!("expected `(u ; v)`, got `{}`", s)))?;
        let (u, v) = body.split_once(';').ok_or_else(|| EqualizerError::Parse(format!("missing `;` in `{}`", s)))?;
        Ok(PairWord::new(&pres.parse_gword(u)?, &pres.parse_gword(v)?))
    }

    pub fn text(&self, pres: &Presentation) -> String {
        format!("({} ; {})", pres.gword_text(&self.u), pres.gword_text(&self.v))
    }
}

/// Element of the generating set `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DGen {
    /// `(r, 1)` for relator `r`.
    Rel(usize),
    /// `(x, x^-1)` for generator `x`.
    Diag(usize),
}

/// A word over `D ∪ D^-1`; signs are `1` or `-1`.
pub type DWord = Vec<(DGen, i8)>;

/// `D = {(r, 1) : r ∈ R} ∪ {(x, x^-1) : x ∈ X}` for a group presentation.
/// Relators are listed once per inverse pair, since `D`-words use both signs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equalizer {
    pub pres: Presentation,
    pub relators: Vec<GWord>,
}

impl fmt::Display for DGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DGen::Rel(i) => write!(f, "r{}", i),
            DGen::Diag(x) => write!(f, "d{}", x),
        }
    }
}

pub fn equalizer_generators(pres: &Presentation) -> Result<Equalizer> {
    if pres.kind != Kind::Group {
        return Err(EqualizerError::NotGroup);
    }
    let mut relators: Vec<GWord> = Vec::new();
    for r in &pres.relators {
        let r = free_reduce(r);
        if !r.is_empty() && !relators.contains(&r) && !relators.contains(&inverse(&r)) {
            relators.push(r);
        }
    }
    Ok(Equalizer { pres: pres.clone(), relators })
}

impl Equalizer {
    pub fn len(&self) -> usize {
        self.relators.len() + self.pres.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gens(&self) -> Vec<DGen> {
        (0..self.relators.len()).map(DGen::Rel).chain((0..self.pres.generators.len()).map(DGen::Diag)).collect()
    }

    pub fn value(&self, d: DGen) -> PairWord {
        match d {
            DGen::Rel(i) => PairWord::new(&self.relators[i], &[]),
            DGen::Diag(x) => PairWord::new(&[x as i32 + 1], &[-(x as i32 + 1)]),
        }
    }

    pub fn generators(&self) -> Vec<PairWord> {
        self.gens().into_iter().map(|d| self.value(d)).collect()
    }

    pub fn eval(&self, w: &[(DGen, i8)]) -> PairWord {
        w.iter().fold(PairWord::one(), |acc, &(d, s)| {
            let x = self.value(d);
            acc.mul(&if s < 0 { x.inverse() } else { x })
        })
    }

    pub fn dword_text(&self, w: &[(DGen, i8)]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|(d, s)| if *s < 0 { format!("{}^-1", d) } else { d.to_string() }).collect::<Vec<_>>().join(" ")
    }
}

fn mckinsey_opts(budget: usize) -> McKinseyOptions {
    McKinseyOptions { yes_budget: budget.max(1), ..McKinseyOptions::default() }
}

/// Whether `u = v` in G, decided by the McKinsey procedure.
pub fn member(pres: &Presentation, p: &PairWord, budget: usize) -> Result<Tri> {
    if pres.kind != Kind::Group {
        return Err(EqualizerError::NotGroup);
    }
    if p.u == p.v {
        return Ok(Tri::Yes);
    }
    Ok(mckinsey_decide(pres, &AnyWord::G(p.u.clone()), &AnyWord::G(p.v.clone()), mckinsey_opts(budget))?.answer)
}

/// A `D`-word with value `(w, 1)`, assembled from a minimal-area derivation
/// of `w` as a product of conjugates `g r^±1 g^-1`, each contributing
/// `(g, ḡ) (r, 1)^±1 (g, ḡ)^-1`.
pub fn express(eq: &Equalizer, w: &[i32], budget: usize) -> Result<DWord> {
    let w = free_reduce(w);
    let path = match area(&eq.pres, &w, budget, None)? {
        Area::Exact(_, path) => path,
        Area::Unknown => {
            let r = mckinsey_decide(&eq.pres, &AnyWord::G(w.clone()), &AnyWord::G(vec![]), mckinsey_opts(budget))?;
            let text = eq.pres.gword_text(&w);
            return Err(match r.answer {
                Tri::No => EqualizerError::NotInNormalClosure(text),
                _ => EqualizerError::Unknown(format!("no derivation of {} within the budget", text)),
            });
        }
    };
    let mut out = DWord::new();
    for step in &path {
        let AnyWord::G(before) = &step.before else { unreachable!("group derivation") };
        let r = &eq.pres.relators[step.relation];
        let (rel, sign) = match eq.relators.iter().position(|x| x == r) {
            Some(i) => (i, 1i8),
            None => (eq.relators.iter().position(|x| *x == inverse(r)).expect("relator listed"), -1),
        };
        let sign = if step.forward { sign } else { -sign };
        let used = if step.forward { r.clone() } else { inverse(r) };
        // before = P t^-1 r' t P^-1 . after, with r' = r^±1 and t its rotation prefix.
        let g = free_reduce(&[&before[..step.position], &inverse(&used[..step.rotation])].concat());
        let diag: DWord = g.iter().map(|&x| (DGen::Diag(x.unsigned_abs() as usize - 1), x.signum() as i8)).collect();
        out.extend(diag.iter().copied());
        out.push((DGen::Rel(rel), sign));
        out.extend(diag.iter().rev().map(|&(d, s)| (d, -s)));
    }
    if eq.eval(&out) != PairWord::new(&w, &[]) {
        return Err(EqualizerError::Unknown("assembled D-word does not evaluate to (w, 1)".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowStatus {
    /// Area and D-length are both exact.
    Exact,
    /// A budget ran out; `dlen` is only the shortest length found.
    BoundOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionRow {
    pub n: usize,
    pub word: GWord,
    pub area: Option<usize>,
    /// Shortest D-length found (from the search, else from `express`).
    pub dlen: Option<usize>,
    /// Every D-word shorter than this was ruled out.
    pub dlen_lower: usize,
    pub status: RowStatus,
}

impl DistortionRow {
    pub fn tsv(&self) -> String {
        let opt = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_else(|| "?".into());
        let status = match self.status {
            RowStatus::Exact => "exact",
            RowStatus::BoundOnly => "bound",
        };
        format!("{}\t{}\t{}\t{}", self.n, opt(self.area), opt(self.dlen), status)
    }
}

pub const TSV_HEADER: &str = "n\tarea\tdlen\tstatus";

/// Shortest D-word with value `target`, by bidirectional breadth-first
/// search. Returns the length if found, else the depth ruled out.
pub fn d_length(eq: &Equalizer, target: &PairWord, budget: usize) -> std::result::Result<usize, usize> {
    let steps: Vec<PairWord> = eq.generators().into_iter().flat_map(|g| [g.inverse(), g]).collect();
    let mut seen = [HashMap::from([(PairWord::one(), 0usize)]), HashMap::from([(target.clone(), 0usize)])];
    let mut frontier = [vec![PairWord::one()], vec![target.clone()]];
    let mut depth = [0usize, 0usize];
    if seen[1].contains_key(&PairWord::one()) {
        return Ok(0);
    }
    loop {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            return Err(depth[0] + depth[1]);
        }
        let mut next = Vec::new();
        let mut best: Option<usize> = None;
        for node in &frontier[side] {
            for s in &steps {
                let n = node.mul(s);
                if seen[side].contains_key(&n) {
                    continue;
                }
                if let Some(&d) = seen[1 - side].get(&n) {
                    let total = depth[side] + 1 + d;
                    best = Some(best.map_or(total, |b| b.min(total)));
                }
                seen[side].insert(n.clone(), depth[side] + 1);
                next.push(n);
                if seen[0].len() + seen[1].len() > budget {
                    return match best {
                        Some(b) => Ok(b),
                        None => Err(depth[0] + depth[1]),
                    };
                }
            }
        }
        depth[side] += 1;
        if let Some(b) = best {
            return Ok(b);
        }
        frontier[side] = next;
    }
}

/// Area and D-length of `(w_n, 1)` for `n = 1..=n_max`, up to `jobs` rows
/// computed in parallel.
pub fn distortion_table(eq: &Equalizer, family: &(dyn Fn(usize) -> GWord + Sync), n_max: usize, budget: usize, jobs: usize) -> Vec<DistortionRow> {
    let ns: Vec<usize> = (1..=n_max).collect();
    let mut rows = Vec::with_capacity(n_max);
    for chunk in ns.chunks(jobs.max(1)) {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunk.iter().map(|&n| scope.spawn(move || row(eq, n, &family(n), budget))).collect();
            rows.extend(handles.into_iter().map(|h| h.join().expect("row computation")));
        });
    }
    rows
}

fn row(eq: &Equalizer, n: usize, w: &[i32], budget: usize) -> DistortionRow {
    let word = free_reduce(w);
    let area = area(&eq.pres, &word, budget, None).ok().and_then(|a| a.value());
    let target = PairWord::new(&word, &[]);
    let (dlen, dlen_lower, exact) = match d_length(eq, &target, budget) {
        Ok(d) => (Some(d), d, true),
        Err(lower) => (express(eq, &word, budget).ok().map(|x| x.len()), lower, false),
    };
    let status = if exact && area.is_some() { RowStatus::Exact } else { RowStatus::BoundOnly };
    DistortionRow { n, word, area, dlen, dlen_lower, status }
}

/// `[x^n, y^n]` over the first two generators.
pub fn commutator_family(n: usize) -> GWord {
    crate::rewriting::commutator(&vec![1; n], &vec![2; n])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSeparation {
    /// A finite image of G in which `u` and `v` differ.
    Finite { structure: FiniteStructure, images: (Vec<usize>, Vec<usize>) },
    /// For G(M): `u v^-1` lies in T and survives in a finite quotient of T.
    Structural(TCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub pair: PairWord,
    pub separation: PairSeparation,
}

impl PairCertificate {
    /// Replay a finite-image certificate against the presentation.
    pub fn check(&self, pres: &Presentation) -> std::result::Result<(), String> {
        match &self.separation {
            PairSeparation::Finite { structure, images } => {
                structure.verify(pres)?;
                let a = structure.eval_gword(&self.pair.u).ok_or("not a group structure")?;
                let b = structure.eval_gword(&self.pair.v).ok_or("not a group structure")?;
                if (&a, &b) != (&images.0, &images.1) {
                    return Err("recorded images differ from evaluation".into());
                }
                if a == b {
                    return Err("images coincide".into());
                }
                Ok(())
            }
            PairSeparation::Structural(_) => Err("structural certificates are checked against a model".into()),
        }
    }
}

// Images of the generators in Z/m as cyclic permutations.
fn cyclic_images(pres: &Presentation, max_m: usize, limit: u64) -> impl Iterator<Item = FiniteStructure> + '_ {
    let g = pres.generators.len();
    (2..=max_m).flat_map(move |m| {
        let total = (m as u64).checked_pow(g as u32).unwrap_or(u64::MAX).min(limit);
        (0..total).filter_map(move |code| {
            let mut c = code;
            let shifts: Vec<usize> = (0..g)
                .map(|_| {
                    let x = (c % m as u64) as usize;
                    c /= m as u64;
                    x
                })
                .collect();
            let ok = pres.relators.iter().all(|r| {
                let s: i64 = r.iter().map(|&x| x.signum() as i64 * shifts[x.unsigned_abs() as usize - 1] as i64).sum();
                s.rem_euclid(m as i64) == 0
            });
            ok.then(|| FiniteStructure::Group { degree: m, perms: shifts.iter().map(|&s| (0..m).map(|i| (i + s) % m).collect()).collect() })
        })
    })
}

/// A finite quotient separating `u` from `v`: cyclic images first, then
/// permutation representations of degree at most `size_cap`.
pub fn separate_pair(pres: &Presentation, p: &PairWord, size_cap: usize, budget: usize) -> Result<PairCertificate> {
    if pres.kind != Kind::Group {
        return Err(EqualizerError::NotGroup);
    }
    if member(pres, p, budget)? == Tri::Yes {
        return Err(EqualizerError::Precondition(format!("{} lies in the equalizer", p.text(pres))));
    }
    let found = |s: FiniteStructure| -> Option<PairCertificate> {
        let a = s.eval_gword(&p.u)?;
        let b = s.eval_gword(&p.v)?;
        (a != b).then(|| PairCertificate { pair: p.clone(), separation: PairSeparation::Finite { structure: s, images: (a, b) } })
    };
    if let Some(c) = cyclic_images(pres, 12, 200_000).find_map(&found) {
        return Ok(c);
    }
    if let Some(c) = enumerate_finite_quotients(pres, size_cap)?.find_map(found) {
        return Ok(c);
    }
    Err(EqualizerError::Unknown(format!("no quotient of size at most {} separates {}", size_cap, p.text(pres))))
}

/// Separation in G(M) for pairs whose quotient `u v^-1` lies in T.
pub fn separate_pair_in_group(data: &GroupPresentationData, model: &Model, p: &PairWord) -> Result<PairCertificate> {
    let (auto, t) = data.evaluate(model, &[&p.u[..], &inverse(&p.v)].concat())?;
    if !auto.is_empty() {
        return Err(EqualizerError::Precondition("u v^-1 is not in T".into()));
    }
    Ok(PairCertificate { pair: p.clone(), separation: PairSeparation::Structural(separate_element(model, &t)?) })
}
