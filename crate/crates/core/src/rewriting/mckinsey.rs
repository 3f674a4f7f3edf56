use serde::{Deserialize, Serialize};

use super::derive::{AnyWord, DerivationStep, Search};
use super::quotients::{enumerate_finite_quotients, FiniteStructure};
use super::{Presentation, Result};
use crate::Tri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McKinseyOptions {
    /// Node budget of each consequence search.
    pub yes_budget: usize,
    pub quotient_cap: usize,
    /// Consequence-search steps per quotient candidate.
    pub ratio: usize,
}

impl Default for McKinseyOptions {
    fn default() -> Self {
        McKinseyOptions { yes_budget: 10_000, quotient_cap: 3, ratio: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// Derivations from both words to a common word.
    Derivation { from_first: Vec<DerivationStep>, from_second: Vec<DerivationStep> },
    /// A finite structure in which the images differ.
    Quotient(FiniteStructure),
    /// The consequence closure of the first word was enumerated completely
    /// and does not contain the second.
    ClassExhausted { size: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McKinsey {
    pub answer: Tri,
    pub certificate: Option<Certificate>,
    pub words_explored: usize,
    pub quotients_tried: usize,
}

impl Certificate {
    /// Independent replay against the presentation.
    pub fn check(&self, pres: &Presentation, w1: &AnyWord, w2: &AnyWord) -> bool {
        match self {
            Certificate::Derivation { from_first, from_second } => {
                let a = super::replay(pres, w1, from_first);
                let b = super::replay(pres, w2, from_second);
                matches!((a, b), (Ok(x), Ok(y)) if x == y)
            }
            Certificate::Quotient(q) => q.verify(pres).is_ok() && q.separates(w1, w2),
            Certificate::ClassExhausted { .. } => {
                let mut s = Search::new(pres, w1.clone(), usize::MAX, None);
                s.run();
                s.exhausted() && !s.contains(w2)
            }
        }
    }
}

/// Interleave the "yes" half (consequence search from both words until
/// they meet) with the "no" half (finite quotients, smallest first).
pub fn mckinsey_decide(pres: &Presentation, w1: &AnyWord, w2: &AnyWord, opts: McKinseyOptions) -> Result<McKinsey> {
    let mut quotients = enumerate_finite_quotients(pres, opts.quotient_cap)?;
    let mut s1 = Search::new(pres, w1.clone(), opts.yes_budget.max(1), None);
    let mut s2 = Search::new(pres, w2.clone(), opts.yes_budget.max(1), None);
    let (mut c1, mut c2) = (0, 0);
    let mut tried = 0;
    let mut stream_done = false;
    let ratio = opts.ratio.max(1);
    loop {
        let mut progressed = false;
        for _ in 0..ratio {
            let a = !s1.truncated && s1.expand_one();
            let b = !s2.truncated && s2.expand_one();
            progressed |= a || b;
            // A word reached from both sides proves equality.
            while c1 < s1.len() {
                let w = s1.word_at(c1).clone();
                c1 += 1;
                if s2.contains(&w) {
                    return Ok(found(&s1, &s2, &w, tried));
                }
            }
            while c2 < s2.len() {
                let w = s2.word_at(c2).clone();
                c2 += 1;
                if s1.contains(&w) {
                    return Ok(found(&s1, &s2, &w, tried));
                }
            }
            if s1.exhausted() {
                return Ok(McKinsey {
                    answer: Tri::No,
                    certificate: Some(Certificate::ClassExhausted { size: s1.len() }),
                    words_explored: s1.len() + s2.len(),
                    quotients_tried: tried,
                });
            }
            if !a && !b {
                break;
            }
        }
        if !stream_done {
            match quotients.next() {
                Some(q) => {
                    tried += 1;
                    if q.separates(w1, w2) {
                        return Ok(McKinsey {
                            answer: Tri::No,
                            certificate: Some(Certificate::Quotient(q)),
                            words_explored: s1.len() + s2.len(),
                            quotients_tried: tried,
                        });
                    }
                    progressed = true;
                }
                None => stream_done = true,
            }
        }
        if !progressed && stream_done {
            return Ok(McKinsey { answer: Tri::Unknown, certificate: None, words_explored: s1.len() + s2.len(), quotients_tried: tried });
        }
    }
}

fn found(s1: &Search, s2: &Search, w: &AnyWord, tried: usize) -> McKinsey {
    McKinsey {
        answer: Tri::Yes,
        certificate: Some(Certificate::Derivation { from_first: s1.path_to(w).unwrap(), from_second: s2.path_to(w).unwrap() }),
        words_explored: s1.len() + s2.len(),
        quotients_tried: tried,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::SWord;

    #[test]
    fn free_monogenic() {
        let p = Presentation::parse("semigroup\ngen a\n").unwrap();
        let aa = AnyWord::S(SWord::word(&[0, 0]));
        let r = mckinsey_decide(&p, &aa, &aa, McKinseyOptions::default()).unwrap();
        assert_eq!(r.answer, Tri::Yes);
        let a = AnyWord::S(SWord::word(&[0]));
        let r = mckinsey_decide(&p, &a, &aa, McKinseyOptions::default()).unwrap();
        assert_eq!(r.answer, Tri::No);
        assert!(r.certificate.unwrap().check(&p, &a, &aa));
    }
}
