//! Certificate bundles: JSON files of emitted certificates that can be
//! replayed later without the code that produced them.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equalizer::{equalizer_generators, DWord, PairCertificate, PairSeparation, PairWord};
use crate::group::{Model, TCertificate};
use crate::machines::MinskyMachine;
use crate::rewriting::{AnyWord, Certificate, Kind, Presentation};
use crate::semigroup::{DepthWitness, QuotientCertificate};

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("cannot read bundle: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed bundle: {0}")]
    Malformed(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BundleItem {
    /// Finite Rees quotient of S(M) separating two words.
    SemigroupQuotient { machine: String, certificate: QuotientCertificate },
    /// McKinsey answer for two words of a presentation.
    WordProblem { presentation: String, w1: String, w2: String, certificate: Certificate },
    DepthWitness { witness: DepthWitness },
    /// Finite quotient of T in which an element survives.
    GroupSeparation { machine: String, certificate: TCertificate },
    PairSeparation { presentation: String, certificate: PairCertificate },
    /// A word over the equalizer generators and the pair it should evaluate to.
    Expression { presentation: String, pair: PairWord, dword: DWord },
}

impl BundleItem {
    pub fn kind(&self) -> &'static str {
        match self {
            BundleItem::SemigroupQuotient { .. } => "semigroup_quotient",
            BundleItem::WordProblem { .. } => "word_problem",
            BundleItem::DepthWitness { .. } => "depth_witness",
            BundleItem::GroupSeparation { .. } => "group_separation",
            BundleItem::PairSeparation { .. } => "pair_separation",
            BundleItem::Expression { .. } => "expression",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    #[serde(flatten)]
    pub item: BundleItem,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Bundle {
    pub items: Vec<Entry>,
}

impl Bundle {
    pub fn push(&mut self, name: impl Into<String>, item: BundleItem) {
        self.items.push(Entry { name: name.into(), item });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        if text.trim().is_empty() {
            return Ok(Bundle::default());
        }
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), BundleError> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }
}

#[derive(Debug, Clone)]
pub struct ItemReport {
    pub name: String,
    pub kind: &'static str,
    pub result: Result<(), String>,
}

#[derive(Debug, Clone, Default)]
pub struct BundleReport {
    pub items: Vec<ItemReport>,
}

impl BundleReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.result.is_ok())
    }
}

impl fmt::Display for BundleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.items {
            match &i.result {
                Ok(()) => writeln!(f, "PASS\t{}\t{}", i.kind, i.name)?,
                Err(e) => writeln!(f, "FAIL\t{}\t{}\t{}", i.kind, i.name, e)?,
            }
        }
        let ok = self.items.iter().filter(|i| i.result.is_ok()).count();
        writeln!(f, "{}/{} items passed", ok, self.items.len())
    }
}

pub fn verify_bundle(path: &Path) -> Result<BundleReport, BundleError> {
    let bundle = Bundle::from_json(&std::fs::read_to_string(path)?)?;
    Ok(verify(&bundle))
}

pub fn verify(bundle: &Bundle) -> BundleReport {
    let items = bundle
        .items
        .iter()
        .map(|e| ItemReport { name: e.name.clone(), kind: e.item.kind(), result: replay(&e.item) })
        .collect();
    BundleReport { items }
}

fn replay(item: &BundleItem) -> Result<(), String> {
    let s = |e: &dyn fmt::Display| e.to_string();
    match item {
        BundleItem::SemigroupQuotient { machine, certificate } => {
            let m = MinskyMachine::parse(machine).map_err(|e| s(&e))?;
            check_cells(&m, certificate)?;
            certificate.check(&m)
        }
        BundleItem::WordProblem { presentation, w1, w2, certificate } => {
            let pres = Presentation::parse(presentation).map_err(|e| s(&e))?;
            let word = |t: &str| -> Result<AnyWord, String> {
                match pres.kind {
                    Kind::Semigroup => pres.parse_sword(t).map(AnyWord::S).map_err(|e| s(&e)),
                    Kind::Group => pres.parse_gword(t).map(AnyWord::G).map_err(|e| s(&e)),
                }
            };
            let (a, b) = (word(w1)?, word(w2)?);
            if certificate.check(&pres, &a, &b) {
                Ok(())
            } else {
                Err("certificate does not replay".into())
            }
        }
        BundleItem::DepthWitness { witness } => witness.replay().map_err(|i| format!("derivation step {} does not apply", i)),
        BundleItem::GroupSeparation { machine, certificate } => {
            let m = MinskyMachine::parse(machine).map_err(|e| s(&e))?;
            let model = Model::new(&m, certificate.element.p).map_err(|e| s(&e))?;
            certificate.check(&model)
        }
        BundleItem::PairSeparation { presentation, certificate } => {
            let pres = Presentation::parse(presentation).map_err(|e| s(&e))?;
            match &certificate.separation {
                PairSeparation::Finite { .. } => certificate.check(&pres),
                PairSeparation::Structural(_) => Err("structural pair certificates need the machine; bundle them as group_separation".into()),
            }
        }
        BundleItem::Expression { presentation, pair, dword } => {
            let pres = Presentation::parse(presentation).map_err(|e| s(&e))?;
            let eq = equalizer_generators(&pres).map_err(|e| s(&e))?;
            if dword.iter().any(|(g, _)| !eq.gens().contains(g)) {
                return Err("the word uses an unknown generator".into());
            }
            let got = eq.eval(dword);
            if &got == pair {
                Ok(())
            } else {
                Err(format!("evaluates to {} instead of {}", got.text(&pres), pair.text(&pres)))
            }
        }
    }
}

// Recompute every cell of the table from the representatives.
fn check_cells(m: &MinskyMachine, c: &QuotientCertificate) -> Result<(), String> {
    let q = &c.quotient;
    let n = q.elements.len();
    if q.table.len() != n || q.table.iter().any(|r| r.len() != n) {
        return Err(format!("table is not {}x{}", n, n));
    }
    for (i, x) in q.elements.iter().enumerate() {
        for (j, y) in q.elements.iter().enumerate() {
            let expected = match (x, y) {
                (Some(x), Some(y)) => q.image(m, &x.mul(y)),
                _ => q.zero,
            };
            if q.table[i][j] != expected {
                return Err(format!("cell ({}, {}) holds {} but the product is {}", i, j, q.table[i][j], expected));
            }
        }
    }
    Ok(())
}
