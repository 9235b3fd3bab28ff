//! Dense statevector simulation.
//!
//! Qubit 0 is the most significant bit of an amplitude index.

use num_complex::Complex64;

use crate::circuit::{Circuit, Component, Op};
use crate::clifford::Clifford1;
use crate::code::StabilizerCode;
use crate::pauli::Pauli;
use crate::{Error, Result};

pub const MAX_ORACLE_QUBITS: usize = 24;
pub const NORM_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check_size(n: usize) -> Result<()> {
        if n > MAX_ORACLE_QUBITS {
            return Err(Error::TooLarge {
                what: "statevector",
                size: n,
                limit: MAX_ORACLE_QUBITS,
            });
        }
        Ok(())
    }

    /// Computational basis state; `index` uses qubit 0 as the top bit.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(Error::Parse(format!("{} amplitudes is not a power of two", amps.len())));
        }
        Self::check_size(n)?;
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let s = self.norm_sqr();
        if s < 1e-24 {
            return Err(Error::ZeroProbability("state has zero norm".into()));
        }
        let f = 1.0 / s.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= f);
        Ok(s)
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    /// Reverses a Pauli bit mask into amplitude-index order.
    fn index_mask(&self, m: u64) -> usize {
        let mut out = 0;
        for q in 0..self.n {
            if m >> q & 1 == 1 {
                out |= self.bit(q);
            }
        }
        out
    }

    pub fn apply_matrix(&mut self, m: &[[Complex64; 2]; 2], q: usize) {
        let b = self.bit(q);
        for i in 0..self.amps.len() {
            if i & b == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | b]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | b] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_clifford1(&mut self, c: Clifford1, q: usize) {
        self.apply_matrix(&c.matrix(), q);
    }

    /// Multi-controlled Z on `qubits` (CZ for two, CCZ for three).
    pub fn apply_mcz(&mut self, qubits: &[usize]) {
        let mask = qubits.iter().fold(0, |m, &q| m | self.bit(q));
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }

    pub fn apply_cx(&mut self, c: usize, t: usize) {
        let (bc, bt) = (self.bit(c), self.bit(t));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
    }

    pub fn apply_pauli(&mut self, p: &Pauli) {
        let x = self.index_mask(p.x_bits());
        let z = self.index_mask(p.z_bits());
        let ph = i_pow(p.raw_phase());
        let mut out = vec![ZERO; self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            let s = if (i & z).count_ones() % 2 == 1 { -ph } else { ph };
            out[i ^ x] = s * a;
        }
        self.amps = out;
    }

    /// Pauli `letter` on `t` when `c` is one.
    pub fn apply_controlled_pauli(&mut self, letter: char, c: usize, t: usize) {
        let p = Pauli::single(self.n, t, letter);
        let bc = self.bit(c);
        let mut branch = self.clone();
        branch.apply_pauli(&p);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bc != 0 {
                *a = branch.amps[i];
            }
        }
    }

    /// `<psi|p|psi>`.
    pub fn expectation(&self, p: &Pauli) -> Complex64 {
        self.overlap_pauli(self, p)
    }

    /// `<self|p|other>`.
    pub fn overlap_pauli(&self, other: &StateVector, p: &Pauli) -> Complex64 {
        let x = self.index_mask(p.x_bits());
        let z = self.index_mask(p.z_bits());
        let mut acc = ZERO;
        for (i, &a) in other.amps.iter().enumerate() {
            let term = self.amps[i ^ x].conj() * a;
            if (i & z).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        acc * i_pow(p.raw_phase())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Projects onto the `(-1)^outcome` eigenspace of Hermitian `p` and
    /// renormalizes; returns the outcome probability. The state is left
    /// untouched when the outcome is impossible.
    pub fn project(&mut self, p: &Pauli, outcome: bool) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::Unsupported(format!("{p} is not Hermitian")));
        }
        let mut out = self.clone();
        out.apply_pauli(p);
        let sign = if outcome { -1.0 } else { 1.0 };
        for (b, a) in out.amps.iter_mut().zip(&self.amps) {
            *b = (a + sign * *b) * 0.5;
        }
        let prob = out.norm_sqr();
        if prob < 1e-12 {
            return Err(Error::ZeroProbability(format!("outcome {} of {p}", outcome as u8)));
        }
        out.normalize()?;
        *self = out;
        Ok(prob)
    }

    /// Unitary components and forced-outcome measurements; EC and segment
    /// markers are skipped.
    pub fn apply(&mut self, c: &Component, outcome: bool) -> Result<f64> {
        let q = &c.qubits;
        match &c.op {
            Op::Clifford(g) => self.apply_clifford1(*g, q[0]),
            Op::Cz | Op::Ccz | Op::Chz => self.apply_mcz(q),
            Op::Cx => self.apply_cx(q[0], q[1]),
            Op::ControlledPauli(l) => self.apply_controlled_pauli(*l, q[0], q[1]),
            Op::MeasureZ => return self.project(&Pauli::single(self.n, q[0], 'Z'), outcome),
            Op::MeasureX => return self.project(&Pauli::single(self.n, q[0], 'X'), outcome),
            Op::PrepZero | Op::PrepPlus => {
                return Err(Error::Unsupported("preparation inside a dense run".into()));
            }
            Op::Ec { .. } | Op::Segment { .. } => {}
        }
        Ok(1.0)
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        for comp in &c.components {
            self.apply(comp, false)?;
        }
        Ok(())
    }

    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        Self::check_size(self.n + other.n)?;
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Ok(Self {
            n: self.n + other.n,
            amps,
        })
    }

    /// Largest amplitude difference after removing a global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let ov = self.inner(other);
        let phase = if ov.norm() > 1e-12 { ov / ov.norm() } else { ONE };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `|b>` of a single-logical-qubit code: project a basis state onto the
/// `+1` space of every generator and logical Z, then apply logical X if `bit`.
pub fn encode(code: &StabilizerCode, bit: bool) -> Result<StateVector> {
    let n = code.n();
    let zl = code.logical('Z')?;
    let checks: Vec<Pauli> = code.gens().iter().copied().chain([zl]).collect();
    let mut last = None;
    for start in 0..1usize << n {
        let mut s = StateVector::basis(n, start)?;
        let ok = checks.iter().all(|g| s.project(g, false).is_ok());
        if ok {
            last = Some(s);
            break;
        }
    }
    let mut s = last.ok_or_else(|| Error::ZeroProbability(format!("codespace of {}", code.label())))?;
    if bit {
        s.apply_pauli(&code.logical('X')?);
    }
    Ok(s)
}

/// Tensor product of encoded blocks, block 0 on the lowest qubit indices.
pub fn encode_blocks(codes: &[StabilizerCode], bits: &[bool]) -> Result<StateVector> {
    let total: usize = codes.iter().map(|c| c.n()).sum();
    StateVector::check_size(total)?;
    let mut it = codes.iter().zip(bits);
    let (c0, b0) = it.next().ok_or_else(|| Error::Circuit("no blocks".into()))?;
    let mut s = encode(c0, *b0)?;
    for (c, b) in it {
        s = s.tensor(&encode(c, *b)?)?;
    }
    Ok(s)
}

/// `Tr(P' Q) / 2^n` for each `Q`, where `P'` projects onto the span of the
/// orthonormal `basis`.
pub fn projector_pauli_decomposition(basis: &[StateVector], qs: &[Pauli]) -> Result<Vec<(Pauli, Complex64)>> {
    let n = basis.first().map(|s| s.n()).unwrap_or(0);
    if n > 16 {
        return Err(Error::TooLarge {
            what: "projector decomposition",
            size: n,
            limit: 16,
        });
    }
    let scale = 1.0 / (1u64 << n) as f64;
    Ok(qs
        .iter()
        .map(|q| (*q, basis.iter().map(|s| s.expectation(q)).sum::<Complex64>() * scale))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::StabilizerGroup;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut s = StateVector::from_amps(amps).unwrap();
        s.normalize().unwrap();
        s
    }

    #[test]
    fn encoded_five_qubit_states() {
        let code = StabilizerCode::builtin("five").unwrap();
        let zl = code.logical('Z').unwrap();
        for (bit, want) in [(false, 1.0), (true, -1.0)] {
            let s = encode(&code, bit).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
            for g in code.gens() {
                assert!((s.expectation(g).re - 1.0).abs() < 1e-10);
            }
            assert!((s.expectation(&zl).re - want).abs() < 1e-10);
        }
    }

    #[test]
    fn steane_zero_is_even_hamming_superposition() {
        let code = StabilizerCode::builtin("steane7").unwrap();
        let s = encode(&code, false).unwrap();
        let support: Vec<usize> = (0..128).filter(|&i| s.amps()[i].norm() > 1e-9).collect();
        assert_eq!(support.len(), 8);
        // Even-weight codewords of the Hamming code: closed under XOR, all
        // weights in {0, 4}, and orthogonal to the Z checks.
        let z_checks: Vec<usize> = code
            .gens()
            .iter()
            .filter(|g| g.x_bits() == 0)
            .map(|g| s.index_mask(g.z_bits()))
            .collect();
        for &a in &support {
            assert!(a.count_ones() % 4 == 0);
            assert!(z_checks.iter().all(|&z| (a & z).count_ones() % 2 == 0));
            assert!((s.amps()[a].norm() - 1.0 / 8f64.sqrt()).abs() < 1e-9);
            for &b in &support {
                assert!(support.contains(&(a ^ b)));
            }
        }
    }

    #[test]
    fn ccz_sign_structure() {
        for idx in 0..8 {
            let mut s = StateVector::basis(3, idx).unwrap();
            s.apply_mcz(&[0, 1, 2]);
            let want = if idx == 7 { -1.0 } else { 1.0 };
            assert_eq!(s.amps()[idx], Complex64::new(want, 0.0));
        }
    }

    #[test]
    fn unitaries_invert() {
        let s0 = random_state(4, 7);
        let mut s = s0.clone();
        let h = Clifford1::by_name("H").unwrap();
        let k = Clifford1::by_name("K").unwrap();
        s.apply_clifford1(k, 1);
        s.apply_cx(0, 2);
        s.apply_mcz(&[1, 2, 3]);
        s.apply_clifford1(h, 3);
        s.apply_controlled_pauli('Y', 3, 0);
        s.apply_controlled_pauli('Y', 3, 0);
        s.apply_clifford1(h, 3);
        s.apply_mcz(&[1, 2, 3]);
        s.apply_cx(0, 2);
        s.apply_clifford1(k.inverse(), 1);
        // Table matrices are fixed only up to a global phase.
        assert!(s.distance_up_to_phase(&s0) < 1e-12);
        assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
    }

    #[test]
    fn k_has_order_three() {
        let k = Clifford1::by_name("K").unwrap();
        for seed in 0..5 {
            let s0 = random_state(1, seed);
            let mut s = s0.clone();
            for _ in 0..3 {
                s.apply_clifford1(k, 0);
            }
            assert!(s.distance_up_to_phase(&s0) < 1e-12);
        }
    }

    #[test]
    fn pauli_action_matches_clifford_conjugation() {
        let s0 = random_state(3, 11);
        for c in Clifford1::all() {
            for l in ['X', 'Y', 'Z'] {
                let p = Pauli::single(3, 1, l);
                let image = c.conjugate(&p, 1);
                // C p |s> == (C p C†) C |s>
                let mut a = s0.clone();
                a.apply_pauli(&p);
                a.apply_clifford1(c, 1);
                let mut b = s0.clone();
                b.apply_clifford1(c, 1);
                b.apply_pauli(&image);
                assert!(a.max_difference(&b) < 1e-12, "{} {l}", c.name());
            }
        }
    }

    #[test]
    fn projection_probabilities() {
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_clifford1(Clifford1::by_name("H").unwrap(), 0);
        let mut t = s.clone();
        assert!((s.project(&"XI".parse().unwrap(), false).unwrap() - 1.0).abs() < 1e-12);
        assert!(t.project(&"XI".parse().unwrap(), true).is_err());
        let p = t.project(&"ZI".parse().unwrap(), true).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn codespace_projector_coefficients() {
        let code = StabilizerCode::builtin("five").unwrap();
        let basis = [encode(&code, false).unwrap(), encode(&code, true).unwrap()];
        let group = StabilizerGroup::new(5, code.gens().to_vec()).unwrap();
        let elems: Vec<Pauli> = group.elements().unwrap().collect();
        assert_eq!(elems.len(), 16);
        let coeffs = projector_pauli_decomposition(&basis, &elems).unwrap();
        for (g, c) in coeffs {
            // Stabilizer elements carry their sign: coefficient exactly +1/16.
            assert!((c - Complex64::new(1.0 / 16.0, 0.0)).norm() < 1e-12, "{g}");
        }
        let off = projector_pauli_decomposition(&basis, &["XIIII".parse().unwrap()]).unwrap();
        assert!(off[0].1.norm() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn random_gate_sequences_keep_norm_and_invert(
            seed in 0u64..1_000_000,
            gates in proptest::collection::vec((0u8..4, 0u8..24, 0usize..5, 1usize..5), 1..20),
        ) {
            let s0 = random_state(5, seed);
            let mut s = s0.clone();
            let apply = |s: &mut StateVector, (kind, g, a, d): (u8, u8, usize, usize), inverse: bool| {
                let b = (a + d) % 5;
                let c = (b + 1 + (a == (b + 1) % 5) as usize) % 5;
                match kind {
                    0 => s.apply_clifford1(if inverse { Clifford1(g).inverse() } else { Clifford1(g) }, a),
                    1 => s.apply_cx(a, b),
                    2 => s.apply_mcz(&[a, b]),
                    _ if c != a && c != b => s.apply_mcz(&[a, b, c]),
                    _ => s.apply_mcz(&[a, b]),
                }
            };
            for &g in &gates {
                apply(&mut s, g, false);
                proptest::prop_assert!((s.norm_sqr() - 1.0).abs() < NORM_TOL);
            }
            for &g in gates.iter().rev() {
                apply(&mut s, g, true);
            }
            proptest::prop_assert!(s.distance_up_to_phase(&s0) < 1e-10);
        }
    }
}
