//! Constant stabilizers, windowed reduction and the classical code a logical
//! operator induces on its own support.

use serde::Serialize;

use crate::clifford::LocalClifford;
use crate::code::StabilizerCode;
use crate::pauli::{gaussian_eliminate, Pauli, Span};
use crate::{Error, Result};

/// Widest window for which `d_C` is found by enumerating codewords.
pub const MAX_WINDOW: usize = 24;

#[derive(Clone, Debug)]
pub struct ConstantStabilizer {
    pub normalizer: Pauli,
    pub gens: Vec<Pauli>,
}

impl ConstantStabilizer {
    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, g: &Pauli) -> bool {
        Span::from_paulis(&self.gens).contains_up_to_phase(g)
    }
}

/// True when `g` commutes with `p` qubit by qubit on the support of `p`.
pub fn is_qubitwise_constant(g: &Pauli, p: &Pauli) -> bool {
    anticommuting_qubits(g, p) == 0
}

/// Mask of qubits where the single-qubit factors of `g` and `p` anticommute.
pub fn anticommuting_qubits(g: &Pauli, p: &Pauli) -> u64 {
    (g.x_bits() & p.z_bits()) ^ (g.z_bits() & p.x_bits())
}

/// `{g ∈ S : [g_i, p_i] = 0 on supp(p)}`, as a generating set.
///
/// Solved directly as the kernel of the per-qubit anticommutation map on the
/// generators, without going through the Z-form frame.
pub fn constant_stabilizer(code: &StabilizerCode, p: &Pauli) -> Result<ConstantStabilizer> {
    code.check_logical(p)?;
    let mut pivots: Vec<(u64, Pauli)> = Vec::new();
    let mut gens = Vec::new();
    for g in code.gens() {
        let mut v = anticommuting_qubits(g, p);
        let mut acc = *g;
        for (pv, pg) in &pivots {
            let low = pv & pv.wrapping_neg();
            if v & low != 0 {
                v ^= pv;
                acc = acc * *pg;
            }
        }
        if v == 0 {
            gens.push(acc);
        } else {
            // keep pivots in echelon form on their lowest set bit
            let low = v & v.wrapping_neg();
            for (pv, pg) in pivots.iter_mut() {
                if *pv & low != 0 {
                    *pv ^= v;
                    *pg = *pg * acc;
                }
            }
            pivots.push((v, acc));
        }
    }
    Ok(ConstantStabilizer { normalizer: *p, gens })
}

/// All weight-one Paulis anticommuting with `p`.
pub fn contagious_errors(p: &Pauli) -> Vec<Pauli> {
    let n = p.n();
    let mut out = Vec::new();
    for q in p.support() {
        for letter in ['X', 'Y', 'Z'] {
            let e = Pauli::single(n, q, letter);
            if !e.commutes_with(p) {
                out.push(e);
            }
        }
    }
    out
}

/// Stabilizer row-reduced on the X side of `supp(p)` after moving `p` to Z-form.
#[derive(Clone, Debug)]
pub struct WindowedStabilizer {
    pub window: Vec<usize>,
    pub frame: LocalClifford,
    /// Reduced rows in the Z-form frame; the first `rank` have X pivots.
    pub rows: Vec<Pauli>,
    pub rank: usize,
    /// Generators in the original frame.
    pub nonconstant: Vec<Pauli>,
    pub constant: Vec<Pauli>,
}

pub fn windowed(code: &StabilizerCode, p: &Pauli) -> Result<WindowedStabilizer> {
    let (frame, zcode) = code.z_form(p)?;
    let window = p.support();
    let reduced = gaussian_eliminate(zcode.gens(), &window);
    let back = frame.inverse();
    let to_orig: Vec<Pauli> = reduced.rows.iter().map(|r| back.conjugate(r)).collect();
    Ok(WindowedStabilizer {
        window,
        frame,
        nonconstant: to_orig[..reduced.rank].to_vec(),
        constant: to_orig[reduced.rank..].to_vec(),
        rows: reduced.rows,
        rank: reduced.rank,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InducedClassicalCode {
    pub window: Vec<usize>,
    /// Parity checks; bit `j` of a row is window position `j`.
    pub checks: Vec<u64>,
    /// `None` when the code has no nonzero codeword.
    pub distance: Option<usize>,
}

impl InducedClassicalCode {
    pub fn width(&self) -> usize {
        self.window.len()
    }

    /// Syndrome of a bit flip at window position `j`.
    pub fn column(&self, j: usize) -> u64 {
        self.checks
            .iter()
            .enumerate()
            .fold(0, |acc, (i, row)| acc | ((row >> j & 1) << i))
    }

    pub fn is_detecting(&self) -> bool {
        self.distance.is_none_or(|d| d >= 2)
    }

    pub fn is_correcting(&self) -> bool {
        self.distance.is_none_or(|d| d >= 3)
    }
}

pub fn induced_classical_code(code: &StabilizerCode, p: &Pauli) -> Result<InducedClassicalCode> {
    let ws = windowed(code, p)?;
    if ws.rank == ws.rows.len() {
        return Err(Error::NoConstantStabilizer(p.to_string()));
    }
    let width = ws.window.len();
    if width > MAX_WINDOW {
        return Err(Error::TooLarge {
            what: "window",
            size: width,
            limit: MAX_WINDOW,
        });
    }
    let mut checks: Vec<u64> = Vec::new();
    for row in &ws.rows[ws.rank..] {
        let mut v = ws
            .window
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &q)| acc | ((row.z_bits() >> q & 1) << j));
        for c in &checks {
            let top = 63 - c.leading_zeros();
            if v >> top & 1 == 1 {
                v ^= c;
            }
        }
        if v != 0 {
            let top = 63 - v.leading_zeros();
            for c in checks.iter_mut() {
                if *c >> top & 1 == 1 {
                    *c ^= v;
                }
            }
            checks.push(v);
        }
    }
    let distance = (1u64..1 << width)
        .filter(|x| checks.iter().all(|c| (c & x).count_ones() % 2 == 0))
        .map(|x| x.count_ones() as usize)
        .min();
    Ok(InducedClassicalCode {
        window: ws.window,
        checks,
        distance,
    })
}

pub fn is_error_detecting(code: &StabilizerCode, p: &Pauli) -> Result<bool> {
    Ok(induced_classical_code(code, p)?.is_detecting())
}

pub fn is_error_correcting(code: &StabilizerCode, p: &Pauli) -> Result<bool> {
    Ok(induced_classical_code(code, p)?.is_correcting())
}

/// Same as [`is_error_correcting`] but a missing constant stabilizer is `false`.
pub fn has_correcting_constant(code: &StabilizerCode, p: &Pauli) -> Result<bool> {
    match is_error_correcting(code, p) {
        Err(Error::NoConstantStabilizer(_)) => Ok(false),
        r => r,
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct Implication {
    pub hypothesis: bool,
    pub conclusion: bool,
}

impl Implication {
    pub fn holds(&self) -> bool {
        !self.hypothesis || self.conclusion
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ImplicationReport {
    pub normalizer: Pauli,
    pub weight: usize,
    pub distance: usize,
    pub windowed_rank: usize,
    pub classical_distance: Option<Option<usize>>,
    pub parts: [Implication; 5],
}

impl ImplicationReport {
    pub fn counterexamples(&self) -> Vec<usize> {
        (0..5).filter(|&i| !self.parts[i].holds()).map(|i| i + 1).collect()
    }
}

/// Code-level facts reused across many normalizers.
#[derive(Clone, Debug, Serialize)]
pub struct CodeFacts {
    pub k: usize,
    pub distance: usize,
    pub nondegenerate: bool,
    pub css: bool,
}

impl CodeFacts {
    pub fn of(code: &StabilizerCode) -> Result<Self> {
        Ok(Self {
            k: code.k(),
            distance: code.distance()?,
            nondegenerate: code.is_nondegenerate()?,
            css: code.is_css()?,
        })
    }
}

pub fn check_window_implications(code: &StabilizerCode, p: &Pauli) -> Result<ImplicationReport> {
    check_window_implications_with(code, &CodeFacts::of(code)?, p)
}

pub fn check_window_implications_with(code: &StabilizerCode, facts: &CodeFacts, p: &Pauli) -> Result<ImplicationReport> {
    let ws = windowed(code, p)?;
    let classical = match induced_classical_code(code, p) {
        Ok(c) => Some(c.distance),
        Err(Error::NoConstantStabilizer(_)) => None,
        Err(e) => return Err(e),
    };
    let d_c_at_least = |m: usize| matches!(classical, Some(d) if d.is_none_or(|d| d >= m));
    let w = p.weight();
    let d = facts.distance;
    let single = facts.k == 1;
    let min_in_coset = crate::pauli::coset_min_weight(p, code.stabilizer())?.0 == w;
    let weight_two_nonconstant = code
        .stabilizer()
        .elements()?
        .any(|g| g.weight() == 2 && !is_qubitwise_constant(&g, p));
    let pure = p.x_bits() == 0 || p.z_bits() == 0;
    let parts = [
        Implication {
            hypothesis: single && d >= 2 && w < 2 * d - 1,
            conclusion: d_c_at_least(2),
        },
        Implication {
            hypothesis: single && min_in_coset && !weight_two_nonconstant && d_c_at_least(2),
            conclusion: d_c_at_least(3),
        },
        Implication {
            hypothesis: single && d >= 3 && w == d && facts.nondegenerate,
            conclusion: d_c_at_least(3),
        },
        Implication {
            hypothesis: single && d_c_at_least(3),
            conclusion: !weight_two_nonconstant,
        },
        Implication {
            hypothesis: single && facts.nondegenerate && facts.css && pure,
            conclusion: d_c_at_least(d),
        },
    ];
    Ok(ImplicationReport {
        normalizer: *p,
        weight: w,
        distance: d,
        windowed_rank: ws.rank,
        classical_distance: classical,
        parts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaAvailability {
    pub logical: char,
    pub constructible: bool,
    /// Lowest-weight normalizer in the coset with a correcting constant stabilizer.
    pub witness: Option<Pauli>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AvailabilityReport {
    pub facts: CodeFacts,
    pub gamma: Vec<GammaAvailability>,
    /// Anticommuting pair of normalizers, both with correcting constant stabilizers.
    pub anticommuting_pair: Option<(Pauli, Pauli)>,
    /// Nondegenerate with `d >= 3` implies some Γ gate is constructible.
    pub universal_by_single_gamma: bool,
    /// Nondegenerate CSS with `d >= 3` implies the anticommuting pair exists.
    pub pair_required: bool,
}

impl AvailabilityReport {
    pub fn consistent(&self) -> bool {
        let any = self.gamma.iter().any(|g| g.constructible);
        (!self.universal_by_single_gamma || any) && (!self.pair_required || self.anticommuting_pair.is_some())
    }
}

pub fn check_gamma_availability(code: &StabilizerCode) -> Result<AvailabilityReport> {
    let facts = CodeFacts::of(code)?;
    if facts.k != 1 {
        return Err(Error::Unsupported("availability checks need k = 1".into()));
    }
    let mut good: Vec<Pauli> = Vec::new();
    for p in code.all_logicals()? {
        if has_correcting_constant(code, &p)? {
            good.push(p);
        }
    }
    good.sort_by_key(|p| (p.weight(), *p));
    let usable = facts.distance >= 3;
    let gamma = ['Z', 'X', 'Y']
        .into_iter()
        .map(|letter| {
            let id = code.coset_id(&code.logical(letter).expect("k = 1"));
            let witness = good.iter().find(|p| code.coset_id(p) == id).copied();
            GammaAvailability {
                logical: letter,
                constructible: usable && witness.is_some(),
                witness,
            }
        })
        .collect();
    let mut pair = None;
    'outer: for (i, a) in good.iter().enumerate() {
        for b in &good[i + 1..] {
            if !a.commutes_with(b) {
                pair = Some((*a, *b));
                break 'outer;
            }
        }
    }
    let nd3 = facts.nondegenerate && usable;
    Ok(AvailabilityReport {
        universal_by_single_gamma: nd3,
        pair_required: nd3 && facts.css,
        facts,
        gamma,
        anticommuting_pair: pair,
    })
}
