//! Dense replay of fault sites on a statevector, as an independent check of
//! the symbolic verdicts.
//!
//! Syndromes come from projective measurements (branching over every
//! outcome with nonzero probability), the decoders are the same functions
//! the symbolic pipeline calls, and the end state is judged against the
//! fault-free output by fidelity after an ideal distance-limited decode.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Pipeline, Verdict};
use crate::circuit::{EcStage, Op};
use crate::errprop::{Fault, FaultLocation, FaultSite};
use crate::par;
use crate::parsec::{css_parsec_step, final_ec, parsec_step, DecoderChoice, SideInfo};
use crate::pauli::Pauli;
use crate::simstate::{encode_blocks, StateVector, MAX_ORACLE_QUBITS};
use crate::{Error, Result};

const MAX_BRANCHES: usize = 1 << 12;
const DETERMINISTIC_TOL: f64 = 1e-9;
const FIDELITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct OracleCheck {
    pub site: usize,
    pub symbolic: bool,
    pub dense: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleAgreement {
    pub seed: u64,
    pub fraction: f64,
    pub checks: Vec<OracleCheck>,
    pub agree: bool,
}

impl OracleAgreement {
    pub fn mismatches(&self) -> impl Iterator<Item = &OracleCheck> {
        self.checks.iter().filter(|c| c.symbolic != c.dense)
    }
}

/// Fault-free input and output of one dense replay.
pub struct DenseReplay<'a> {
    p: &'a Pipeline,
    input: StateVector,
    ideal: StateVector,
    /// Per block, physical rows (constant then nonconstant) for the final round.
    final_rows: Vec<Vec<Pauli>>,
}

/// Every outcome sequence of measuring `rows` in order, with the
/// post-measurement state. Outcome `true` is the `-1` eigenvalue.
fn measure_all(s: &StateVector, rows: &[Pauli]) -> Result<Vec<(StateVector, Vec<bool>)>> {
    let mut out = vec![(s.clone(), Vec::with_capacity(rows.len()))];
    for g in rows {
        let mut next = Vec::with_capacity(out.len());
        for (st, bits) in out {
            let e = st.expectation(g).re;
            for outcome in [false, true] {
                let prob = if outcome { (1.0 - e) / 2.0 } else { (1.0 + e) / 2.0 };
                if prob < DETERMINISTIC_TOL {
                    continue;
                }
                let mut b = st.clone();
                if prob < 1.0 - DETERMINISTIC_TOL {
                    b.project(g, outcome)?;
                }
                let mut bits = bits.clone();
                bits.push(outcome);
                next.push((b, bits));
            }
        }
        if next.len() > MAX_BRANCHES {
            return Err(Error::TooLarge {
                what: "measurement branches",
                size: next.len(),
                limit: MAX_BRANCHES,
            });
        }
        out = next;
    }
    Ok(out)
}

/// Packs a flat outcome list into per-block words of the given widths.
fn pack(bits: &[bool], widths: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut at = 0;
    widths
        .map(|w| {
            let word = bits[at..at + w]
                .iter()
                .enumerate()
                .fold(0u64, |acc, (k, &b)| acc | (b as u64) << k);
            at += w;
            word
        })
        .collect()
}

struct Injection {
    at: Option<usize>,
    pauli: Option<Pauli>,
    flip: Option<usize>,
}

impl<'a> DenseReplay<'a> {
    /// Encodes a random logical superposition (fixed by `seed`) and its
    /// fault-free image.
    pub fn new(p: &'a Pipeline, seed: u64) -> Result<Self> {
        let n = p.n();
        if n > MAX_ORACLE_QUBITS {
            return Err(Error::TooLarge {
                what: "oracle register",
                size: n,
                limit: MAX_ORACLE_QUBITS,
            });
        }
        let codes: Vec<_> = p.pc.blocks.iter().map(|b| b.code.clone()).collect();
        let h = codes.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut input: Option<StateVector> = None;
        for word in 0..1usize << h {
            let bits: Vec<bool> = (0..h).map(|j| word >> j & 1 == 1).collect();
            let c = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            let term = encode_blocks(&codes, &bits)?;
            input = Some(match input {
                None => scaled(&term, c)?,
                Some(acc) => add(&acc, &scaled(&term, c)?)?,
            });
        }
        let mut input = input.ok_or_else(|| Error::Circuit("no blocks".into()))?;
        input.normalize()?;
        let mut ideal = input.clone();
        ideal.apply_circuit(&p.circuit)?;
        let back = p.frame.inverse();
        let final_rows = p
            .views
            .iter()
            .map(|v| {
                v.constant
                    .iter()
                    .chain(&v.nonconstant)
                    .map(|g| back.conjugate(&g.embed(n, v.offset)))
                    .collect()
            })
            .collect();
        Ok(Self {
            p,
            input,
            ideal,
            final_rows,
        })
    }

    /// Whether every measurement branch of `site` ends in the ideal output.
    pub fn passes(&self, site: Option<&FaultSite>) -> Result<bool> {
        let inj = match site {
            None => Injection {
                at: None,
                pauli: None,
                flip: None,
            },
            Some(FaultSite { location, fault }) => {
                let at = match location {
                    FaultLocation::Input => None,
                    FaultLocation::After(i) => Some(*i),
                };
                let (pauli, flip) = match fault {
                    Fault::Pauli(q) => (Some(*q), None),
                    Fault::Flip(b) => (None, Some(*b)),
                };
                Injection { at, pauli, flip }
            }
        };
        let mut s = self.input.clone();
        if let (Some(FaultSite { location: FaultLocation::Input, .. }), Some(q)) = (site, inj.pauli) {
            s.apply_pauli(&q);
        }
        self.walk(0, s, SideInfo::empty(self.p.views.len()), 0, &inj)
    }

    fn inject(&self, i: usize, s: &mut StateVector, inj: &Injection) {
        if inj.at == Some(i) {
            if let Some(q) = &inj.pauli {
                s.apply_pauli(q);
            }
        }
    }

    fn flip_here(&self, i: usize, inj: &Injection) -> Option<usize> {
        if inj.at == Some(i) {
            inj.flip
        } else {
            None
        }
    }

    fn walk(&self, from: usize, mut s: StateVector, side: SideInfo, round: usize, inj: &Injection) -> Result<bool> {
        let p = self.p;
        let comps = &p.circuit.components;
        for i in from..comps.len() {
            match &comps[i].op {
                Op::Ec {
                    stage: EcStage::Intermediate,
                    ..
                } => return self.intermediate(i, s, side, round, inj),
                Op::Ec {
                    stage: EcStage::Final, ..
                } => return self.finish(i, s, &side, inj),
                _ => {
                    s.apply(&comps[i], false)?;
                    self.inject(i, &mut s, inj);
                }
            }
        }
        Err(Error::Circuit("no final error correction".into()))
    }

    fn intermediate(&self, i: usize, s: StateVector, side: SideInfo, round: usize, inj: &Injection) -> Result<bool> {
        let p = self.p;
        if p.choice == DecoderChoice::Lookup {
            let mut s = s;
            self.inject(i, &mut s, inj);
            return self.walk(i + 1, s, side, round + 1, inj);
        }
        let rows: Vec<Pauli> = p.constant.iter().flatten().copied().collect();
        let flips = p.constant_flips(self.flip_here(i, inj));
        let piece = &p.pc.pieces[round];
        for (mut b, bits) in measure_all(&s, &rows)? {
            let constant: Vec<u64> = pack(&bits, p.views.iter().map(|v| v.constant.len()))
                .into_iter()
                .zip(&flips)
                .map(|(s, f)| s ^ f)
                .collect();
            let out = match p.choice {
                DecoderChoice::Parsec => parsec_step(&p.views, piece, &constant, &mut |j| self.nonconstant(&b, round, j)),
                _ => css_parsec_step(&p.views, piece, &constant),
            };
            let Ok(out) = out else { return Ok(false) };
            b.apply_pauli(&p.embed_corrections(&out.corrections));
            let next = if out.forward.is_empty() { side.clone() } else { out.forward.clone() };
            self.inject(i, &mut b, inj);
            if !self.walk(i + 1, b, next, round + 1, inj)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Nonconstant syndrome of block `j` after piece `round`: undo the gates
    /// so far and read the plain rows. Only a deterministic outcome is a
    /// valid answer.
    fn nonconstant(&self, s: &StateVector, round: usize, j: usize) -> Result<u64> {
        let p = self.p;
        let v = &p.views[j];
        let mut u = s.clone();
        for g in p.pc.pieces[..=round].iter().flatten().rev() {
            u.apply_mcz(g);
        }
        let mut word = 0u64;
        for (k, t) in v.nonconstant.iter().enumerate() {
            let e = u.expectation(&t.embed(p.n(), v.offset)).re;
            if (e.abs() - 1.0).abs() > DETERMINISTIC_TOL {
                return Err(Error::Guarantee(format!("row {k} of block {} is not determined", v.name)));
            }
            if e < 0.0 {
                word |= 1 << k;
            }
        }
        Ok(word)
    }

    fn finish(&self, i: usize, s: StateVector, side: &SideInfo, inj: &Injection) -> Result<bool> {
        let p = self.p;
        let rows: Vec<Pauli> = self.final_rows.iter().flatten().copied().collect();
        let widths = || p.views.iter().map(|v| v.constant.len() + v.nonconstant.len());
        let flips = p.full_flips(self.flip_here(i, inj));
        let last = p.pc.pieces.last().map(|x| x.as_slice()).unwrap_or(&[]);
        let back = p.frame.inverse();
        for (mut b, bits) in measure_all(&s, &rows)? {
            let full: Vec<u64> = pack(&bits, widths()).into_iter().zip(&flips).map(|(s, f)| s ^ f).collect();
            let Ok((corr, _)) = final_ec(&p.views, last, &full, side, p.choice) else {
                return Ok(false);
            };
            b.apply_pauli(&back.conjugate(&p.embed_corrections(&corr)));
            self.inject(i, &mut b, inj);
            // ideal distance-limited decode of what is left
            for (mut c, bits) in measure_all(&b, &rows)? {
                let words = pack(&bits, widths());
                let mut fix = Vec::with_capacity(p.views.len());
                for (v, w) in p.views.iter().zip(words) {
                    let r = v.lookup.decode(w);
                    if r.weight() > (v.distance - 1) / 2 {
                        return Ok(false);
                    }
                    fix.push(r);
                }
                c.apply_pauli(&back.conjugate(&p.embed_corrections(&fix)));
                if self.ideal.inner(&c).norm_sqr() < 1.0 - FIDELITY_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn scaled(s: &StateVector, c: Complex64) -> Result<StateVector> {
    StateVector::from_amps(s.amps().iter().map(|a| a * c).collect())
}

fn add(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    StateVector::from_amps(a.amps().iter().zip(b.amps()).map(|(x, y)| x + y).collect())
}

/// Replays a seeded sample of `fraction` of the sites densely and compares
/// pass/fail with `verdicts`.
pub fn oracle_agreement(p: &Pipeline, verdicts: &[Verdict], fraction: f64, seed: u64) -> Result<OracleAgreement> {
    let total = p.sites.len();
    let k = ((total as f64 * fraction).ceil() as usize).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, total, k).into_vec();
    picked.sort_unstable();
    let replay = DenseReplay::new(p, seed)?;
    let dense = par::map(&picked, |&i| replay.passes(Some(&p.sites[i])));
    let mut checks = Vec::with_capacity(k);
    for (&site, d) in picked.iter().zip(dense) {
        checks.push(OracleCheck {
            site,
            symbolic: verdicts[site].passed(),
            dense: d?,
        });
    }
    Ok(OracleAgreement {
        seed,
        fraction,
        agree: checks.iter().all(|c| c.symbolic == c.dense),
        checks,
    })
}
