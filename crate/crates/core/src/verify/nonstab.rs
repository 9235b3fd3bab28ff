//! Whether the codespace at an intermediate cut is still a stabilizer code.
//!
//! Symbolic criterion: some nonconstant generator, pushed through the gates
//! before the cut, carries a CZ factor. Dense check: the projector onto the
//! image of the codespace, expanded over Paulis built from those generators,
//! has nonzero coefficients of more than one magnitude.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::circuit::{Component, PieceableCircuit};
use crate::errprop::DressedError;
use crate::parsec::BlockView;
use crate::pauli::{bits, Pauli};
use crate::simstate::{encode_blocks, projector_pauli_decomposition, StateVector};
use crate::{Error, Result};

pub const MAX_DECOMPOSITION_QUBITS: usize = 16;
const MAX_ENDPOINTS: usize = 12;
const MAGNITUDE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorCheck {
    pub terms: usize,
    pub nonzero: usize,
    /// Distinct nonzero magnitudes, ascending.
    pub magnitudes: Vec<f64>,
    pub nonstabilizer: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonstabilizerReport {
    pub cut: usize,
    pub pieces: usize,
    /// Generators that picked up CZ factors, as `pauli*CZ(a,b)...`.
    pub dressed: Vec<String>,
    pub criterion_nonstabilizer: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<ProjectorCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_skipped: Option<String>,
}

fn describe(e: &DressedError) -> String {
    let mut s = e.pauli.to_string();
    for (a, b) in e.pairs() {
        s.push_str(&format!("*CZ({a},{b})"));
    }
    s
}

/// Every generator of the frame code on the full register, pushed through
/// the gates of the first `cut` pieces.
pub fn generators_at_cut(pc: &PieceableCircuit, cut: usize) -> Result<Vec<DressedError>> {
    let n = pc.n_total();
    let mut rows = Vec::new();
    for b in &pc.blocks {
        let v = BlockView::from_gamma(b)?;
        rows.extend(
            v.constant
                .iter()
                .chain(&v.nonconstant)
                .map(|g| DressedError::new(g.embed(n, b.offset))),
        );
    }
    for g in pc.pieces[..cut].iter().flatten() {
        let op = Component::diagonal(g.clone()).op;
        for r in rows.iter_mut() {
            *r = r.conjugate(&op, g)?;
        }
    }
    Ok(rows)
}

fn projector_check(pc: &PieceableCircuit, cut: usize, rows: &[DressedError]) -> Result<ProjectorCheck> {
    let n = pc.n_total();
    let codes: Vec<_> = pc.blocks.iter().map(|b| b.code.clone()).collect();
    let frame = pc.frame();
    let h = codes.len();
    let mut basis = Vec::with_capacity(1 << h);
    for word in 0..1usize << h {
        let flags: Vec<bool> = (0..h).map(|j| word >> j & 1 == 1).collect();
        let mut s: StateVector = encode_blocks(&codes, &flags)?;
        for (q, c) in frame.0.iter().enumerate() {
            s.apply_clifford1(*c, q);
        }
        for g in pc.pieces[..cut].iter().flatten() {
            s.apply_mcz(g);
        }
        basis.push(s);
    }
    let mut qs = BTreeSet::from([Pauli::identity(n)]);
    for r in rows {
        let ends = bits(r.dressed_mask());
        if ends.len() > MAX_ENDPOINTS {
            return Err(Error::TooLarge {
                what: "dressing endpoints",
                size: ends.len(),
                limit: MAX_ENDPOINTS,
            });
        }
        for t in 0..1u64 << ends.len() {
            let on: Vec<usize> = bits(t).into_iter().map(|k| ends[k]).collect();
            qs.insert((r.pauli * Pauli::z_on(n, &on)).unsigned());
        }
    }
    let qs: Vec<Pauli> = qs.into_iter().collect();
    let coeffs = projector_pauli_decomposition(&basis, &qs)?;
    let mut mags: Vec<f64> = coeffs.iter().map(|(_, c)| c.norm()).filter(|m| *m > MAGNITUDE_TOL).collect();
    let nonzero = mags.len();
    mags.sort_by(|a, b| a.total_cmp(b));
    mags.dedup_by(|a, b| (*a - *b).abs() <= MAGNITUDE_TOL);
    Ok(ProjectorCheck {
        terms: qs.len(),
        nonzero,
        nonstabilizer: mags.len() > 1,
        magnitudes: mags,
    })
}

/// Both verdicts for the cut after `cut` pieces. Cuts 0 and `pieces` are
/// the codespace itself, so the criterion treats them as stabilizer.
pub fn detect_nonstabilizer(pc: &PieceableCircuit, cut: usize) -> Result<NonstabilizerReport> {
    let m = pc.pieces.len();
    if cut > m {
        return Err(Error::Circuit(format!("cut {cut} past the last of {m} pieces")));
    }
    let rows = generators_at_cut(pc, cut)?;
    let dressed: Vec<String> = rows.iter().filter(|r| !r.is_plain()).map(describe).collect();
    let interior = cut > 0 && cut < m;
    let (oracle, oracle_skipped) = if pc.n_total() > MAX_DECOMPOSITION_QUBITS {
        (None, Some(format!("{} qubits exceed {MAX_DECOMPOSITION_QUBITS}", pc.n_total())))
    } else {
        (Some(projector_check(pc, cut, &rows)?), None)
    };
    Ok(NonstabilizerReport {
        cut,
        pieces: m,
        criterion_nonstabilizer: interior && !dressed.is_empty(),
        dressed,
        oracle,
        oracle_skipped,
    })
}
