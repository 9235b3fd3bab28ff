//! Does a Γ circuit implement its logical gate?
//!
//! Two independent routes: Pauli conjugation through the (Clifford) circuit
//! for a single control, and a dense comparison on every encoded basis state.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Op, PieceableCircuit};
use crate::code::{conjugate_cx, conjugate_cz};
use crate::pauli::{Pauli, StabilizerGroup};
use crate::simstate::{encode_blocks, StateVector, MAX_ORACLE_QUBITS};
use crate::{Error, Result};

pub const AMPLITUDE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct TableauCheck {
    /// Images of stabilizer generators that left the group.
    pub escaped: Vec<String>,
    /// Logical operators whose image differs from the target's.
    pub wrong: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleActionCheck {
    pub basis_states: usize,
    pub max_amplitude_error: f64,
    pub min_stabilizer_expectation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalActionReport {
    pub blocks: usize,
    pub qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tableau: Option<TableauCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleActionCheck>,
    pub pass: bool,
}

fn normalizers(pc: &PieceableCircuit) -> Vec<Pauli> {
    let n = pc.n_total();
    pc.blocks.iter().map(|b| b.normalizer.embed(n, b.offset)).collect()
}

fn stabilizer(pc: &PieceableCircuit) -> Result<StabilizerGroup> {
    let n = pc.n_total();
    let gens = pc
        .blocks
        .iter()
        .flat_map(|b| b.code.gens().iter().map(move |g| g.embed(n, b.offset)))
        .collect();
    StabilizerGroup::new(n, gens)
}

/// `U p U†` for the unitary part of the circuit.
pub fn conjugate_through(pc: &PieceableCircuit, p: &Pauli) -> Result<Pauli> {
    let mut out = *p;
    for c in &pc.to_circuit().components {
        let q = &c.qubits;
        out = match &c.op {
            Op::Clifford(g) => g.conjugate(&out, q[0]),
            Op::Cz => conjugate_cz(&out, q[0], q[1]),
            Op::Cx => conjugate_cx(&out, q[0], q[1]),
            Op::Ec { .. } | Op::Segment { .. } => out,
            other => return Err(Error::Unsupported(format!("{other:?} is not Clifford"))),
        };
    }
    Ok(out)
}

/// Controlled-`p_B` conjugation rule for two blocks with normalizers `p_A`, `p_B`.
fn expected_image(q: &Pauli, pa: &Pauli, pb: &Pauli) -> Pauli {
    match (q.commutes_with(pa), q.commutes_with(pb)) {
        (true, true) => *q,
        (false, true) => *q * *pb,
        (true, false) => *q * *pa,
        (false, false) => (*q * *pa * *pb).negated(),
    }
}

/// Conjugation check for a two-block (controlled-Pauli) circuit.
pub fn tableau_check(pc: &PieceableCircuit) -> Result<TableauCheck> {
    if pc.blocks.len() != 2 {
        return Err(Error::Unsupported("the tableau route needs exactly two blocks".into()));
    }
    let n = pc.n_total();
    let group = stabilizer(pc)?;
    let ps = normalizers(pc);
    let mut escaped = Vec::new();
    for g in group.gens() {
        if !group.contains(&conjugate_through(pc, g)?) {
            escaped.push(g.to_string());
        }
    }
    let mut wrong = Vec::new();
    for b in &pc.blocks {
        for letter in ['X', 'Z'] {
            let q = b.code.logical(letter)?.embed(n, b.offset);
            let image = conjugate_through(pc, &q)?;
            let want = expected_image(&q, &ps[0], &ps[1]);
            if !group.contains(&(image * want)) {
                wrong.push(format!("{q} -> {image}"));
            }
        }
    }
    Ok(TableauCheck {
        pass: escaped.is_empty() && wrong.is_empty(),
        escaped,
        wrong,
    })
}

/// `(I - 2 ∏_j (I - p_j)/2) |psi>`.
fn target_applied(s: &StateVector, ps: &[Pauli]) -> Result<StateVector> {
    let mut proj = s.clone();
    for p in ps {
        let mut flipped = proj.clone();
        flipped.apply_pauli(p);
        proj = StateVector::from_amps(
            proj.amps()
                .iter()
                .zip(flipped.amps())
                .map(|(a, b)| (a - b) * 0.5)
                .collect(),
        )?;
    }
    StateVector::from_amps(s.amps().iter().zip(proj.amps()).map(|(a, b)| a - b * 2.0).collect())
}

/// Dense comparison on all `2^blocks` encoded basis states. One global phase
/// is fixed on the all-zero input and shared by the rest.
pub fn oracle_check(pc: &PieceableCircuit) -> Result<OracleActionCheck> {
    let n = pc.n_total();
    if n > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            what: "oracle register",
            size: n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    let codes: Vec<_> = pc.blocks.iter().map(|b| b.code.clone()).collect();
    let ps = normalizers(pc);
    let gens: Vec<Pauli> = stabilizer(pc)?.gens().to_vec();
    let circuit = pc.to_circuit();
    let h = codes.len();
    let mut phase: Option<Complex64> = None;
    let mut max_err = 0.0f64;
    let mut min_exp = f64::INFINITY;
    for word in 0..1usize << h {
        let bits: Vec<bool> = (0..h).map(|j| word >> j & 1 == 1).collect();
        let input = encode_blocks(&codes, &bits)?;
        let want = target_applied(&input, &ps)?;
        let mut got = input;
        got.apply_circuit(&circuit)?;
        let ph = *phase.get_or_insert_with(|| {
            let ov = got.inner(&want);
            if ov.norm() > 1e-12 {
                ov / ov.norm()
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
        for (a, b) in got.amps().iter().zip(want.amps()) {
            max_err = max_err.max((a * ph - b).norm());
        }
        for g in &gens {
            min_exp = min_exp.min(got.expectation(g).re);
        }
    }
    Ok(OracleActionCheck {
        basis_states: 1 << h,
        max_amplitude_error: max_err,
        min_stabilizer_expectation: min_exp,
        pass: max_err <= AMPLITUDE_TOL && (1.0 - min_exp) <= 1e-10,
    })
}

/// Tableau route for two blocks, dense route whenever the register fits.
pub fn check_logical_action(pc: &PieceableCircuit) -> Result<LogicalActionReport> {
    let n = pc.n_total();
    let tableau = if pc.blocks.len() == 2 { Some(tableau_check(pc)?) } else { None };
    let oracle = if n <= MAX_ORACLE_QUBITS { Some(oracle_check(pc)?) } else { None };
    if tableau.is_none() && oracle.is_none() {
        return Err(Error::TooLarge {
            what: "oracle register",
            size: n,
            limit: MAX_ORACLE_QUBITS,
        });
    }
    let pass = tableau.as_ref().is_none_or(|t| t.pass) && oracle.as_ref().is_none_or(|o| o.pass);
    Ok(LogicalActionReport {
        blocks: pc.blocks.len(),
        qubits: n,
        tableau,
        oracle,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{five_cz_two_piece, synth_gamma, Ccz21Layout};
    use crate::code::StabilizerCode;

    fn gamma(code: &str, h: usize) -> PieceableCircuit {
        let c = StabilizerCode::builtin(code).unwrap();
        let p = c.logical_z()[0];
        synth_gamma(&vec![(c, p); h], &"Z".repeat(h)).unwrap()
    }

    #[test]
    fn cz_on_five_prime_by_both_routes() {
        let r = check_logical_action(&five_cz_two_piece()).unwrap();
        assert_eq!(r.qubits, 10);
        assert!(r.tableau.as_ref().unwrap().pass, "{:?}", r.tableau);
        let o = r.oracle.unwrap();
        assert!(o.pass && o.max_amplitude_error <= AMPLITUDE_TOL, "{o:?}");
        assert_eq!(o.basis_states, 4);
    }

    #[test]
    fn ccz_on_five_prime_oracle() {
        let pc = gamma("five_prime", 3);
        assert_eq!(pc.gate_count(), 27);
        let r = check_logical_action(&pc).unwrap();
        assert!(r.tableau.is_none());
        assert!(r.pass, "{:?}", r.oracle);
    }

    #[test]
    fn dropping_a_gate_breaks_the_action() {
        let pc = five_cz_two_piece();
        let mut pieces = pc.pieces.clone();
        pieces[0].pop();
        let broken = pc.with_pieces(pieces).unwrap();
        let r = check_logical_action(&broken).unwrap();
        assert!(!r.tableau.unwrap().pass);
        assert!(!r.oracle.unwrap().pass);
    }

    #[test]
    fn logical_ccz_has_single_sign() {
        // Amplitude-level truth table: only |111> picks up -1.
        let pc = gamma("five_prime", 3);
        let codes: Vec<_> = pc.blocks.iter().map(|b| b.code.clone()).collect();
        let circuit = pc.to_circuit();
        let zero = encode_blocks(&codes, &[false; 3]).unwrap();
        let mut z_out = zero.clone();
        z_out.apply_circuit(&circuit).unwrap();
        let phase = zero.inner(&z_out);
        for word in 0..8usize {
            let bits: Vec<bool> = (0..3).map(|j| word >> j & 1 == 1).collect();
            let s = encode_blocks(&codes, &bits).unwrap();
            let mut out = s.clone();
            out.apply_circuit(&circuit).unwrap();
            let ratio = s.inner(&out) / phase;
            let want = if word == 7 { -1.0 } else { 1.0 };
            assert!((ratio - Complex64::new(want, 0.0)).norm() < 1e-9, "{word}: {ratio}");
        }
    }

    #[test]
    fn steane_ccz_oracle() {
        let c = StabilizerCode::builtin("steane7").unwrap();
        let p = Pauli::z_on(7, &[4, 5, 6]);
        let pc = synth_gamma(&vec![(c, p); 3], "ZZZ").unwrap();
        assert!(check_logical_action(&pc).unwrap().pass);
        assert!(check_logical_action(&Ccz21Layout::reference().pieceable().unwrap()).unwrap().pass);
    }
}
