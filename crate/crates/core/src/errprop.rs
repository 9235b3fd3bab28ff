//! Dressed errors: a Pauli times a product of CZ factors.
//!
//! Conjugating a Pauli through a diagonal multi-controlled Z leaves a Pauli
//! times a diagonal phase polynomial. While that polynomial has degree ≤ 2 it
//! is a sign, some Z's and a set of CZ pairs, which is all we track.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::circuit::{Circuit, Op};
use crate::clifford::Clifford1;
use crate::code::conjugate_cx;
use crate::pauli::Pauli;
use crate::{Error, Result};

/// Default bound on CZ pairs accepted by [`expand_branches`].
pub const DEFAULT_MAX_PAIRS: usize = 6;

/// `pauli · ∏ CZ(a, b)`, the CZ product acting first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DressedError {
    pub pauli: Pauli,
    pairs: Vec<(u8, u8)>,
}

impl From<Pauli> for DressedError {
    fn from(pauli: Pauli) -> Self {
        Self::new(pauli)
    }
}

impl DressedError {
    pub fn new(pauli: Pauli) -> Self {
        Self {
            pauli,
            pairs: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Pauli::identity(n))
    }

    pub fn with_pairs(pauli: Pauli, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut e = Self::new(pauli);
        for (a, b) in pairs {
            e.toggle_pair(a, b);
        }
        e
    }

    pub fn n(&self) -> usize {
        self.pauli.n()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_plain(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Qubits carrying a CZ factor.
    pub fn dressed_mask(&self) -> u64 {
        self.pairs.iter().fold(0, |m, &(a, b)| m | 1 << a | 1 << b)
    }

    /// Support of the Pauli part plus all CZ endpoints.
    pub fn located(&self) -> u64 {
        self.pauli.support_mask() | self.dressed_mask()
    }

    pub fn toggle_pair(&mut self, a: usize, b: usize) {
        assert!(a != b, "CZ pair needs distinct qubits");
        assert!(a < self.n() && b < self.n());
        let key = (a.min(b) as u8, a.max(b) as u8);
        match self.pairs.binary_search(&key) {
            Ok(i) => {
                self.pairs.remove(i);
            }
            Err(i) => self.pairs.insert(i, key),
        }
    }

    /// Applies `p` after this error.
    pub fn then(&self, p: &Pauli) -> Self {
        Self {
            pauli: *p * self.pauli,
            pairs: self.pairs.clone(),
        }
    }

    /// `U E U†` for a multi-controlled Z on `qubits`.
    ///
    /// With `s` the X-support on the gate, `U X^s U = X^s · (−1)^{f(x)+f(x⊕s)}`
    /// for `f = ∏ x_i`. The exponent expands into one monomial per proper
    /// subset of `s` (times all gate qubits outside `s`).
    fn through_multi_z(&self, qubits: &[usize]) -> Result<Self> {
        let xs: Vec<usize> = qubits.iter().copied().filter(|&q| self.pauli.x_bits() >> q & 1 == 1).collect();
        if xs.is_empty() {
            return Ok(self.clone());
        }
        let rest: Vec<usize> = qubits.iter().copied().filter(|q| !xs.contains(q)).collect();
        let mut out = self.clone();
        let mut z = self.pauli.z_bits();
        let mut sign = 0u8;
        for t in 0..(1u32 << xs.len()) - 1 {
            let mut vars: Vec<usize> = rest.clone();
            vars.extend(xs.iter().enumerate().filter(|(i, _)| t >> i & 1 == 1).map(|(_, &q)| q));
            match vars[..] {
                [] => sign ^= 1,
                [a] => z ^= 1 << a,
                [a, b] => out.toggle_pair(a, b),
                _ => {
                    return Err(Error::Unsupported(format!(
                        "dressing of degree {} from {} qubits",
                        vars.len(),
                        qubits.len()
                    )))
                }
            }
        }
        out.pauli = Pauli::from_bits(self.n(), self.pauli.x_bits(), z, self.pauli.raw_phase() + 2 * sign);
        Ok(out)
    }

    fn require_undressed(&self, qubits: &[usize], what: &str) -> Result<()> {
        let m = self.dressed_mask();
        if let Some(q) = qubits.iter().find(|&&q| m >> q & 1 == 1) {
            return Err(Error::Unsupported(format!("{what} on dressed qubit {q}; expand first")));
        }
        Ok(())
    }

    fn through_single(&self, g: Clifford1, q: usize) -> Result<Self> {
        if !g.is_diagonal() {
            self.require_undressed(&[q], &g.name())?;
        }
        Ok(Self {
            pauli: g.conjugate(&self.pauli, q),
            pairs: self.pairs.clone(),
        })
    }

    fn through_cx(&self, c: usize, t: usize) -> Result<Self> {
        self.require_undressed(&[c, t], "CX")?;
        Ok(Self {
            pauli: conjugate_cx(&self.pauli, c, t),
            pairs: self.pairs.clone(),
        })
    }

    /// Propagates through one gate: returns `U E U†`.
    pub fn conjugate(&self, op: &Op, qubits: &[usize]) -> Result<Self> {
        match op {
            Op::Cz | Op::Ccz | Op::Chz => self.through_multi_z(qubits),
            Op::Cx => self.through_cx(qubits[0], qubits[1]),
            Op::Clifford(g) => self.through_single(*g, qubits[0]),
            Op::ControlledPauli('Z') => self.through_multi_z(qubits),
            Op::ControlledPauli('X') => self.through_cx(qubits[0], qubits[1]),
            Op::ControlledPauli('Y') => {
                // CY = S_t · CX · S_t†
                let s = Clifford1::by_name("S")?;
                self.through_single(s.inverse(), qubits[1])?
                    .through_cx(qubits[0], qubits[1])?
                    .through_single(s, qubits[1])
            }
            _ => Err(Error::Unsupported(format!("propagation through {op:?}"))),
        }
    }
}

/// Pauli branches of a dressed error, all sharing one located support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branches {
    pub located: u64,
    pub paulis: Vec<Pauli>,
}

/// Expands the CZ product into Z strings, `CZ(a,b) = (I + Z_a + Z_b - Z_a Z_b) / 2`,
/// and returns the strings with nonzero coefficient times the Pauli part.
pub fn expand_branches(err: &DressedError, max_pairs: usize) -> Result<Branches> {
    if err.pair_count() > max_pairs {
        return Err(Error::TooLarge {
            what: "CZ dressing",
            size: err.pair_count(),
            limit: max_pairs,
        });
    }
    let mut terms = BTreeMap::from([(0u64, 1i64)]);
    for (a, b) in err.pairs() {
        let (ma, mb) = (1u64 << a, 1u64 << b);
        let mut next = BTreeMap::new();
        for (&v, &c) in &terms {
            for (m, sign) in [(0, 1), (ma, 1), (mb, 1), (ma ^ mb, -1)] {
                *next.entry(v ^ m).or_insert(0i64) += sign * c;
            }
        }
        next.retain(|_, c| *c != 0);
        terms = next;
    }
    let masks = terms.into_keys();
    let n = err.n();
    Ok(Branches {
        located: err.located(),
        paulis: masks.into_iter().map(|v| err.pauli * Pauli::from_bits(n, 0, v, 0)).collect(),
    })
}

/// Who may read a stabilizer and under what promise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilizerRole {
    Constant,
    Nonconstant { guaranteed: bool },
}

/// Outcome bit of measuring `stab` on a state hit by `err`.
///
/// The bit is well defined only when neither operator has X support on the
/// other's CZ endpoints; otherwise the measurement would not commute through.
pub fn syndrome_of_dressed(err: &DressedError, stab: &DressedError, role: StabilizerRole) -> Result<bool> {
    match role {
        StabilizerRole::Constant if !stab.is_plain() => {
            return Err(Error::Guarantee(format!("constant stabilizer {} is dressed", stab.pauli)))
        }
        StabilizerRole::Nonconstant { guaranteed: false } => {
            return Err(Error::Guarantee(format!("nonconstant stabilizer {}", stab.pauli)))
        }
        _ => {}
    }
    if err.pauli.x_bits() & stab.dressed_mask() != 0 || stab.pauli.x_bits() & err.dressed_mask() != 0 {
        return Err(Error::Guarantee(format!(
            "{} does not commute through {} up to sign",
            stab.pauli, err.pauli
        )));
    }
    Ok(!err.pauli.commutes_with(&stab.pauli))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Fault {
    /// Pauli applied right after the location.
    Pauli(Pauli),
    /// Flip of one classical outcome bit.
    Flip(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FaultLocation {
    /// Before the first component, standing for the leading error correction.
    Input,
    After(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FaultSite {
    pub location: FaultLocation,
    pub fault: Fault,
}

/// Every non-identity Pauli on `qubits`, X before Z before Y per qubit.
pub fn paulis_on(n: usize, qubits: &[usize]) -> Vec<Pauli> {
    let k = qubits.len();
    (1..1u64 << (2 * k))
        .map(|code| {
            qubits.iter().enumerate().fold(Pauli::identity(n), |acc, (i, &q)| {
                match code >> (2 * i) & 3 {
                    1 => acc * Pauli::single(n, q, 'X'),
                    2 => acc * Pauli::single(n, q, 'Z'),
                    3 => acc * Pauli::single(n, q, 'Y'),
                    _ => acc,
                }
            })
        })
        .collect()
}

fn data_qubits(c: &Circuit, names: &[String]) -> Vec<usize> {
    let mut qs: Vec<usize> = c
        .blocks
        .iter()
        .filter(|b| !b.ancilla && names.contains(&b.name))
        .flat_map(|b| b.qubits.iter().copied())
        .collect();
    qs.sort_unstable();
    qs
}

/// One single-qubit Pauli per data qubit and letter, before the circuit.
pub fn input_faults(c: &Circuit) -> Vec<FaultSite> {
    let names: Vec<String> = c.blocks.iter().map(|b| b.name.clone()).collect();
    data_qubits(c, &names)
        .into_iter()
        .flat_map(|q| paulis_on(c.n_qubits, &[q]))
        .map(|p| FaultSite {
            location: FaultLocation::Input,
            fault: Fault::Pauli(p),
        })
        .collect()
}

/// The single-fault model of every component of `c`, in component order.
///
/// `syndrome_bits(i)` gives the number of outcome bits the EC at component
/// `i` measures.
pub fn enumerate_faults(c: &Circuit, syndrome_bits: &dyn Fn(usize) -> usize) -> Vec<FaultSite> {
    let n = c.n_qubits;
    let mut out = Vec::new();
    for (i, comp) in c.components.iter().enumerate() {
        let at = FaultLocation::After(i);
        let faults: Vec<Fault> = match &comp.op {
            Op::Segment { .. } => Vec::new(),
            Op::PrepZero => vec![Fault::Pauli(Pauli::single(n, comp.qubits[0], 'X'))],
            Op::PrepPlus => vec![Fault::Pauli(Pauli::single(n, comp.qubits[0], 'Z'))],
            Op::MeasureZ | Op::MeasureX => vec![Fault::Flip(0)],
            Op::Ec { blocks, .. } => data_qubits(c, blocks)
                .into_iter()
                .flat_map(|q| paulis_on(n, &[q]))
                .map(Fault::Pauli)
                .chain((0..syndrome_bits(i)).map(Fault::Flip))
                .collect(),
            _ => paulis_on(n, &comp.qubits).into_iter().map(Fault::Pauli).collect(),
        };
        out.extend(faults.into_iter().map(|fault| FaultSite { location: at, fault }));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use crate::circuit::{Component, EcStage};
    use crate::code::conjugate_cz;
    use proptest::prelude::*;

    fn p(s: &str) -> Pauli {
        s.parse().unwrap()
    }

    #[test]
    fn ccz_spreads_a_cz_pair() {
        let e = DressedError::new(p("XII"));
        let out = e.conjugate(&Op::Ccz, &[0, 1, 2]).unwrap();
        assert_eq!(out, DressedError::with_pairs(p("XII"), [(1, 2)]));
        let z = DressedError::new(p("ZIZ"));
        assert_eq!(z.conjugate(&Op::Ccz, &[0, 1, 2]).unwrap(), z);
    }

    #[test]
    fn cz_matches_tableau() {
        let e = DressedError::new(p("XI"));
        assert_eq!(e.conjugate(&Op::Cz, &[0, 1]).unwrap().pauli, p("XZ"));
        for s in ["XX", "YX", "YY", "ZX", "IY", "-XY"] {
            let q = p(s);
            let out = DressedError::new(q).conjugate(&Op::Cz, &[0, 1]).unwrap();
            assert!(out.is_plain());
            assert_eq!(out.pauli, conjugate_cz(&q, 0, 1), "{s}");
        }
    }

    // Dense oracle: U E U† against P·D with D built from the pair list.
    fn dense_op(n: usize, e: &DressedError) -> Vec<Vec<num_complex::Complex64>> {
        use num_complex::Complex64 as C;
        let dim = 1usize << n;
        let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
        let mut m = vec![vec![C::new(0.0, 0.0); dim]; dim];
        for x in 0..dim {
            let mut d = 1.0;
            for (a, b) in e.pairs() {
                if bit(x, a) & bit(x, b) == 1 {
                    d = -d;
                }
            }
            // i^phase X^x Z^z |x> = i^phase (-1)^{z·x} |x ⊕ xbits>
            let mut y = x;
            let mut amp = C::new(d, 0.0) * C::new(0.0, 1.0).powu(e.pauli.raw_phase() as u32);
            for q in 0..n {
                if e.pauli.z_bits() >> q & 1 == 1 && bit(x, q) == 1 {
                    amp = -amp;
                }
                if e.pauli.x_bits() >> q & 1 == 1 {
                    y ^= 1 << (n - 1 - q);
                }
            }
            m[y][x] = amp;
        }
        m
    }

    fn dense_conj_ccz(n: usize, m: &[Vec<num_complex::Complex64>], qs: &[usize]) -> Vec<Vec<num_complex::Complex64>> {
        let sign = |x: usize| {
            if qs.iter().all(|&q| (x >> (n - 1 - q)) & 1 == 1) {
                -1.0
            } else {
                1.0
            }
        };
        let dim = m.len();
        let mut out = m.to_vec();
        for r in 0..dim {
            for c in 0..dim {
                out[r][c] = m[r][c] * sign(r) * sign(c);
            }
        }
        out
    }

    fn close(a: &[Vec<num_complex::Complex64>], b: &[Vec<num_complex::Complex64>]) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn multi_z_rule_matches_dense_conjugation() {
        let n = 4;
        for code in 0..(1u32 << 8) {
            let x = (code & 15) as u64;
            let z = (code >> 4) as u64;
            let e = DressedError::with_pairs(Pauli::from_bits(n, x, z, 1), [(0, 3)]);
            for qs in [&[0usize, 1][..], &[1, 2, 3], &[0, 2]] {
                let got = e.conjugate(&Op::Chz, qs).unwrap();
                let want = dense_conj_ccz(n, &dense_op(n, &e), qs);
                assert!(close(&dense_op(n, &got), &want), "{e:?} through {qs:?}");
            }
        }
    }

    #[test]
    fn cubic_dressing_is_rejected() {
        let e = DressedError::new(p("XIII"));
        assert!(matches!(e.conjugate(&Op::Chz, &[0, 1, 2, 3]), Err(Error::Unsupported(_))));
        let z = DressedError::new(p("ZIII"));
        assert_eq!(z.conjugate(&Op::Chz, &[0, 1, 2, 3]).unwrap(), z);
    }

    #[test]
    fn nondiagonal_gate_on_dressed_endpoint_is_rejected() {
        let e = DressedError::with_pairs(p("XIII"), [(1, 2)]);
        let h = Op::Clifford(Clifford1::by_name("H").unwrap());
        assert!(e.conjugate(&h, &[1]).is_err());
        assert!(e.conjugate(&h, &[3]).is_ok());
        let s = Op::Clifford(Clifford1::by_name("S").unwrap());
        assert!(e.conjugate(&s, &[1]).is_ok());
        assert!(e.conjugate(&Op::Cx, &[2, 3]).is_err());
        assert!(e.conjugate(&Op::Cx, &[0, 3]).is_ok());
    }

    #[test]
    fn branch_expansion_drops_cancelled_strings() {
        // Walsh transform of the diagonal of CZ(0,1) CZ(0,2) on three qubits.
        let phase = |x: usize| {
            let bit = |q: usize| x >> q & 1;
            if (bit(0) & bit(1)) ^ (bit(0) & bit(2)) == 1 { -1i64 } else { 1 }
        };
        let mut want = BTreeSet::new();
        for m in 0..8usize {
            let c: i64 = (0..8usize).map(|x| phase(x) * if (x & m).count_ones() % 2 == 1 { -1 } else { 1 }).sum();
            if c != 0 {
                want.insert(Pauli::from_bits(3, 0, m as u64, 0));
            }
        }
        let e = DressedError::with_pairs(Pauli::identity(3), [(0, 1), (0, 2)]);
        let got: BTreeSet<Pauli> = expand_branches(&e, DEFAULT_MAX_PAIRS).unwrap().paulis.into_iter().collect();
        assert_eq!(got, want);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn branch_expansion() {
        let e = DressedError::with_pairs(p("XIII"), [(1, 2)]);
        let b = expand_branches(&e, DEFAULT_MAX_PAIRS).unwrap();
        let want: BTreeSet<Pauli> = ["XIII", "XZII", "XIZI", "XZZI"].iter().map(|s| p(s)).collect();
        assert_eq!(b.paulis.iter().copied().collect::<BTreeSet<_>>(), want);
        assert_eq!(b.located, 0b111);
        let id = expand_branches(&DressedError::identity(3), DEFAULT_MAX_PAIRS).unwrap();
        assert_eq!(id.paulis, vec![Pauli::identity(3)]);
        let big = DressedError::with_pairs(Pauli::identity(8), (1..8).map(|b| (0, b)));
        assert!(matches!(expand_branches(&big, DEFAULT_MAX_PAIRS), Err(Error::TooLarge { .. })));
        assert!(expand_branches(&big, 7).is_ok());
    }

    #[test]
    fn two_node_ccz_fault_through_more_gates_gives_sixteen_branches() {
        // Three blocks of five; fault X on A0 and B5 after CCZ(0,5,10), then
        // one further CCZ on each faulty node.
        let mut e = DressedError::new(Pauli::x_on(15, &[0, 5]));
        e = e.conjugate(&Op::Ccz, &[0, 7, 12]).unwrap();
        e = e.conjugate(&Op::Ccz, &[2, 5, 14]).unwrap();
        let b = expand_branches(&e, DEFAULT_MAX_PAIRS).unwrap();
        assert_eq!(b.paulis.len(), 16);
        for block in 0..3 {
            assert!((b.located >> (5 * block) & 0b11111).count_ones() <= 2);
        }
    }

    #[test]
    fn syndrome_guarantees() {
        // Constant stabilizer of A on 15 qubits; error X on A's qubit 3 with
        // pairs in B×C.
        let err = DressedError::with_pairs(Pauli::single(15, 3, 'X'), [(5, 10), (7, 12)]);
        let constant = DressedError::new(p("-ZZZXI").embed(15, 0));
        assert!(!syndrome_of_dressed(&err, &constant, StabilizerRole::Constant).unwrap());
        let constant2 = DressedError::new(p("ZZZZI").embed(15, 0));
        assert!(syndrome_of_dressed(&err, &constant2, StabilizerRole::Constant).unwrap());
        // Nonconstant stabilizer of A: Pauli on A, CZ on B×C; error is Z's on B.
        let z_only = DressedError::new(Pauli::z_on(15, &[5, 7]));
        let nc = DressedError::with_pairs(p("XIXZZ").embed(15, 0), [(5, 10)]);
        let g = StabilizerRole::Nonconstant { guaranteed: true };
        assert!(!syndrome_of_dressed(&z_only, &nc, g).unwrap());
        let a_err = DressedError::new(Pauli::single(15, 0, 'Z'));
        assert!(syndrome_of_dressed(&a_err, &nc, g).unwrap());
        assert!(matches!(
            syndrome_of_dressed(&a_err, &nc, StabilizerRole::Nonconstant { guaranteed: false }),
            Err(Error::Guarantee(_))
        ));
        let x_on_b = DressedError::new(Pauli::single(15, 5, 'X'));
        assert!(matches!(syndrome_of_dressed(&x_on_b, &nc, g), Err(Error::Guarantee(_))));
    }

    #[test]
    fn fault_counts() {
        let mut c = Circuit::new(3);
        c.add_block("A", vec![0, 1, 2]);
        c.push(Component::ccz(0, 1, 2));
        assert_eq!(enumerate_faults(&c, &|_| 0).len(), 63);

        let mut c = Circuit::new(10);
        c.add_block("A", (0..5).collect());
        c.add_block("B", (5..10).collect());
        for a in [0, 2, 4] {
            for b in [5, 7, 9] {
                c.push(Component::cz(a, b));
            }
        }
        assert_eq!(enumerate_faults(&c, &|_| 0).len(), 135);
        assert_eq!(input_faults(&c).len(), 30);
        c.push(Component::ec(EcStage::Final, vec!["A".into(), "B".into()]));
        assert_eq!(enumerate_faults(&c, &|_| 8).len(), 135 + 30 + 8);
    }

    #[test]
    fn paulis_on_is_complete_and_distinct() {
        let ps = paulis_on(4, &[0, 2, 3]);
        assert_eq!(ps.len(), 63);
        assert_eq!(ps.iter().collect::<BTreeSet<_>>().len(), 63);
        assert!(ps.iter().all(|q| q.support_mask() & !0b1101 == 0 && !q.is_negative()));
    }

    fn arb_pauli(n: usize) -> impl Strategy<Value = Pauli> {
        (0u64..1 << n, 0u64..1 << n, 0u8..4).prop_map(move |(x, z, ph)| Pauli::from_bits(n, x, z, ph))
    }

    fn gate_strategy() -> impl Strategy<Value = (Op, Vec<usize>)> {
        prop_oneof![
            (0usize..6, 1usize..6).prop_map(|(a, d)| (Op::Cz, vec![a, (a + d) % 6])),
            Just((Op::Ccz, vec![0, 2, 4])),
            Just((Op::Ccz, vec![1, 3, 5])),
            (0usize..6, 1usize..6).prop_map(|(a, d)| (Op::Cx, vec![a, (a + d) % 6])),
            (0u8..24, 0usize..6).prop_map(|(g, q)| (Op::Clifford(Clifford1(g)), vec![q])),
        ]
    }

    fn inverse_op(op: &Op) -> Op {
        match op {
            Op::Clifford(g) => Op::Clifford(g.inverse()),
            other => other.clone(),
        }
    }

    proptest! {
        #[test]
        fn gate_then_inverse_is_identity(e in arb_pauli(6), pairs in prop::collection::vec((0usize..6, 1usize..6), 0..3),
                                        (op, qs) in gate_strategy()) {
            let d = DressedError::with_pairs(e, pairs.into_iter().map(|(a, k)| (a, (a + k) % 6)));
            if let Ok(once) = d.conjugate(&op, &qs) {
                let back = once.conjugate(&inverse_op(&op), &qs).unwrap();
                prop_assert_eq!(back, d);
            }
        }

        #[test]
        fn plain_errors_follow_the_tableau(e in arb_pauli(6), gates in prop::collection::vec(gate_strategy(), 0..12)) {
            let gates: Vec<_> = gates.into_iter().filter(|(op, _)| !matches!(op, Op::Ccz)).collect();
            let mut d = DressedError::new(e);
            let mut t = e;
            for (op, qs) in &gates {
                d = d.conjugate(op, qs).unwrap();
                t = match op {
                    Op::Cz => conjugate_cz(&t, qs[0], qs[1]),
                    Op::Cx => conjugate_cx(&t, qs[0], qs[1]),
                    Op::Clifford(g) => g.conjugate(&t, qs[0]),
                    _ => unreachable!(),
                };
            }
            prop_assert!(d.is_plain());
            prop_assert_eq!(d.pauli, t);
        }
    }
}
