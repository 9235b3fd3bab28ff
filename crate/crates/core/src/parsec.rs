//! Adaptive intermediate error correction and the final decoders.
//!
//! Everything here works in the frame where each block's normalizer is `+Z`
//! on its support, with qubits local to the block unless noted.

use std::collections::HashMap;

use serde::Serialize;

use crate::circuit::GammaBlock;
use crate::code::{for_each_weight, StabilizerCode, MAX_SCAN_QUBITS};
use crate::pauli::{bits, gaussian_eliminate, syndrome, Pauli, Span};
use crate::{Error, Result};

/// Minimum-weight decoder over a fixed generator list.
#[derive(Clone, Debug)]
pub struct LookupTable {
    gens: Vec<Pauli>,
    table: HashMap<u64, Pauli>,
}

impl LookupTable {
    /// Fills the table weight by weight; the first Pauli found for a syndrome
    /// wins, which fixes ties in enumeration order.
    pub fn new(gens: &[Pauli]) -> Result<Self> {
        let n = gens.first().map(|g| g.n()).unwrap_or(0);
        if n > MAX_SCAN_QUBITS {
            return Err(Error::TooLarge {
                what: "lookup table",
                size: n,
                limit: MAX_SCAN_QUBITS,
            });
        }
        let target = 1usize << Span::from_paulis(gens).rank();
        let mut table = HashMap::with_capacity(target);
        for w in 0..=n {
            for_each_weight(n, w, |p| {
                table.entry(syndrome(&p, gens)).or_insert(p);
            });
            if table.len() == target {
                break;
            }
        }
        Ok(Self {
            gens: gens.to_vec(),
            table,
        })
    }

    pub fn gens(&self) -> &[Pauli] {
        &self.gens
    }

    pub fn syndrome(&self, e: &Pauli) -> u64 {
        syndrome(e, &self.gens)
    }

    /// Correction for `s`; identity for syndromes no Pauli produces.
    pub fn decode(&self, s: u64) -> Pauli {
        let n = self.gens.first().map(|g| g.n()).unwrap_or(0);
        self.table.get(&s).copied().unwrap_or_else(|| Pauli::identity(n))
    }
}

/// Minimum-weight Pauli with syndrome `s` against the code's generators.
pub fn lookup_decode(code: &StabilizerCode, s: u64) -> Result<Pauli> {
    Ok(LookupTable::new(code.gens())?.decode(s))
}

/// The unique class, modulo the stabilizer, of Paulis supported on `located`
/// with syndrome `s` against `gens`.
pub fn located_decode_with(gens: &[Pauli], stabilizer: &Span, s: u64, located: u64) -> Result<Pauli> {
    let n = gens.first().map(|g| g.n()).unwrap_or(0);
    let qs = bits(located);
    if qs.len() > 8 {
        return Err(Error::TooLarge {
            what: "located set",
            size: qs.len(),
            limit: 8,
        });
    }
    let mut found: Option<Pauli> = None;
    for code in 0..1u64 << (2 * qs.len()) {
        let mut x = 0;
        let mut z = 0;
        for (i, &q) in qs.iter().enumerate() {
            x |= (code >> (2 * i) & 1) << q;
            z |= (code >> (2 * i + 1) & 1) << q;
        }
        let p = Pauli::from_bits(n, x, z, 0);
        if syndrome(&p, gens) != s {
            continue;
        }
        match found {
            None => found = Some(p),
            Some(f) if stabilizer.contains_up_to_phase(&(f * p)) => {}
            Some(f) => {
                return Err(Error::Decode(format!("{f} and {p} share a syndrome on the located qubits")));
            }
        }
    }
    found.ok_or_else(|| Error::Decode(format!("no error on qubits {qs:?} has syndrome {s:#b}")))
}

pub fn located_erasure_decode(code: &StabilizerCode, s: u64, located: u64) -> Result<Pauli> {
    let d = code.distance()?;
    if located.count_ones() as usize > d - 1 {
        return Err(Error::Decode(format!(
            "{} located qubits exceed distance {d} minus one",
            located.count_ones()
        )));
    }
    located_decode_with(code.gens(), &code.stabilizer().span(), s, located)
}

/// One block as the decoders see it.
#[derive(Clone, Debug)]
pub struct BlockView {
    pub name: String,
    pub offset: usize,
    pub n: usize,
    pub distance: usize,
    /// Local mask of the normalizer's support.
    pub active: u64,
    /// Generators with no X on the active qubits.
    pub constant: Vec<Pauli>,
    /// Remaining generators, as restricted to this block.
    pub nonconstant: Vec<Pauli>,
    pub stabilizer: Span,
    /// Over `constant` followed by `nonconstant`.
    pub lookup: LookupTable,
    /// Constant syndrome of `X` on each active qubit, when they are distinct.
    contagious: Option<HashMap<u64, usize>>,
}

impl BlockView {
    /// `code` must already be in the frame where the normalizer is `+Z`.
    pub fn new(name: &str, offset: usize, code: &StabilizerCode, active: u64) -> Result<Self> {
        let window = bits(active);
        let reduced = gaussian_eliminate(code.gens(), &window);
        let nonconstant = reduced.rows[..reduced.rank].to_vec();
        let constant = reduced.rows[reduced.rank..].to_vec();
        let n = code.n();
        let mut seen = HashMap::new();
        let mut distinct = true;
        for &q in &window {
            let s = syndrome(&Pauli::single(n, q, 'X'), &constant);
            if s == 0 || seen.insert(s, q).is_some() {
                distinct = false;
            }
        }
        let gens: Vec<Pauli> = constant.iter().chain(&nonconstant).copied().collect();
        Ok(Self {
            name: name.to_string(),
            offset,
            n,
            distance: code.distance()?,
            active,
            lookup: LookupTable::new(&gens)?,
            stabilizer: code.stabilizer().span(),
            constant,
            nonconstant,
            contagious: distinct.then_some(seen),
        })
    }

    pub fn from_gamma(b: &GammaBlock) -> Result<Self> {
        Self::new(&b.name, b.offset, &b.frame_code(), b.normalizer.support_mask())
    }

    /// Whether the constant stabilizer tells every contagious X apart.
    pub fn is_correcting(&self) -> bool {
        self.contagious.is_some()
    }

    /// Active qubit whose X error has constant syndrome `s`.
    pub fn pinpoint(&self, s: u64) -> Option<usize> {
        self.contagious.as_ref()?.get(&s).copied()
    }

    /// Whether no single-qubit error on an idle qubit shares a constant
    /// syndrome with a contagious X.
    pub fn separates_idle(&self) -> bool {
        let Some(table) = &self.contagious else {
            return false;
        };
        let idle = !self.active & ((1u64 << self.n) - 1);
        bits(idle).into_iter().all(|q| {
            ['X', 'Y', 'Z']
                .iter()
                .all(|&l| !table.contains_key(&syndrome(&Pauli::single(self.n, q, l), &self.constant)))
        })
    }

    pub fn constant_syndrome(&self, local: &Pauli) -> u64 {
        syndrome(local, &self.constant)
    }

    /// Bits over `constant` then `nonconstant`.
    pub fn full_syndrome(&self, local: &Pauli) -> u64 {
        self.lookup.syndrome(local)
    }

    pub fn mask(&self) -> u64 {
        ((1u64 << self.n) - 1) << self.offset
    }

    pub fn local(&self, global: &Pauli) -> Pauli {
        global.slice(self.offset, self.n).unsigned()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerCase {
    MultiBlockTrigger,
    SingleBlockTrigger,
    NoTrigger,
}

/// Located qubits per block (local masks) where Z errors may sit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SideInfo {
    pub located: Vec<u64>,
    pub origin: Option<String>,
}

impl SideInfo {
    pub fn empty(blocks: usize) -> Self {
        Self {
            located: vec![0; blocks],
            origin: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.located.iter().all(|&m| m == 0)
    }

    pub fn merge(&mut self, other: &SideInfo) {
        for (a, b) in self.located.iter_mut().zip(&other.located) {
            *a |= b;
        }
        if self.origin.is_none() {
            self.origin.clone_from(&other.origin);
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecoderOutcome {
    pub case: TriggerCase,
    /// Local correction per block.
    pub corrections: Vec<Pauli>,
    pub forward: SideInfo,
    pub nonconstant_requested: bool,
}

/// Gates of the piece just completed, as global qubit lists.
pub type Piece<'a> = &'a [Vec<usize>];

/// Marks the other-block partners of global qubit `q` in `piece`.
fn spread(views: &[BlockView], piece: Piece, q: usize, info: &mut SideInfo) {
    for g in piece.iter().filter(|g| g.contains(&q)) {
        for &r in g.iter().filter(|&&r| r != q) {
            if let Some(j) = views.iter().position(|v| v.mask() >> r & 1 == 1) {
                info.located[j] |= 1 << (r - views[j].offset);
            }
        }
    }
}

fn identity_corrections(views: &[BlockView]) -> Vec<Pauli> {
    views.iter().map(|v| Pauli::identity(v.n)).collect()
}

/// X on each pinpointed active qubit, with the spread noted.
fn correct_contagious(
    views: &[BlockView],
    piece: Piece,
    triggered: &[usize],
    constant: &[u64],
    out: &mut DecoderOutcome,
) -> Result<()> {
    for &j in triggered {
        let v = &views[j];
        let q = v
            .pinpoint(constant[j])
            .ok_or_else(|| Error::Decode(format!("block {} constant syndrome {:#b} names no active qubit", v.name, constant[j])))?;
        out.corrections[j] = Pauli::single(v.n, q, 'X');
        out.forward.located[j] |= 1 << q;
        spread(views, piece, q + v.offset, &mut out.forward);
    }
    Ok(())
}

/// One round of the adaptive procedure.
///
/// `nonconstant(j)` measures block `j`'s nonconstant generators; it is only
/// called once a single block has triggered.
pub fn parsec_step(
    views: &[BlockView],
    piece: Piece,
    constant: &[u64],
    nonconstant: &mut dyn FnMut(usize) -> Result<u64>,
) -> Result<DecoderOutcome> {
    if let Some(v) = views.iter().find(|v| !v.is_correcting()) {
        return Err(Error::Unsupported(format!("block {} lacks an error-correcting constant stabilizer", v.name)));
    }
    let triggered: Vec<usize> = (0..views.len()).filter(|&j| constant[j] != 0).collect();
    let mut out = DecoderOutcome {
        case: TriggerCase::NoTrigger,
        corrections: identity_corrections(views),
        forward: SideInfo::empty(views.len()),
        nonconstant_requested: false,
    };
    match triggered[..] {
        [] => {}
        [j] => {
            out.case = TriggerCase::SingleBlockTrigger;
            out.nonconstant_requested = true;
            let v = &views[j];
            let s = constant[j] | nonconstant(j)? << v.constant.len();
            let c = v.lookup.decode(s);
            for q in bits(c.x_bits() & v.active) {
                spread(views, piece, q + v.offset, &mut out.forward);
            }
            out.corrections[j] = c;
            out.forward.origin = Some(format!("single error in block {}", v.name));
        }
        _ => {
            out.case = TriggerCase::MultiBlockTrigger;
            correct_contagious(views, piece, &triggered, constant, &mut out)?;
            out.forward.origin = Some("multi-qubit gate fault".into());
        }
    }
    Ok(out)
}

/// Whether every block meets the CSS variant's input conditions.
pub fn css_precondition(views: &[BlockView]) -> bool {
    views.iter().all(|v| v.separates_idle())
}

/// The CSS variant: blocks are handled independently from constant
/// syndromes alone; idle-qubit errors are left for the final round.
pub fn css_parsec_step(views: &[BlockView], piece: Piece, constant: &[u64]) -> Result<DecoderOutcome> {
    if let Some(v) = views.iter().find(|v| !v.separates_idle()) {
        return Err(Error::Unsupported(format!(
            "block {} constant stabilizer does not separate contagious from idle errors",
            v.name
        )));
    }
    let mut out = DecoderOutcome {
        case: TriggerCase::NoTrigger,
        corrections: identity_corrections(views),
        forward: SideInfo::empty(views.len()),
        nonconstant_requested: false,
    };
    let contagious: Vec<usize> = (0..views.len())
        .filter(|&j| views[j].pinpoint(constant[j]).is_some())
        .collect();
    let fired = constant.iter().filter(|&&s| s != 0).count();
    out.case = match fired {
        0 => TriggerCase::NoTrigger,
        1 => TriggerCase::SingleBlockTrigger,
        _ => TriggerCase::MultiBlockTrigger,
    };
    correct_contagious(views, piece, &contagious, constant, &mut out)?;
    if !contagious.is_empty() {
        out.forward.origin = Some("contagious error".into());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderChoice {
    Parsec,
    CssParsec,
    /// No intermediate correction; the final round decodes each block alone.
    Lookup,
}

/// Final round from measured syndromes (per block, over `constant` then
/// `nonconstant`).
///
/// The last piece gets the same trigger analysis as an intermediate round,
/// with every generator readable; then blocks with located qubits are
/// decoded as erasures and the rest by lookup. A round that forwards side
/// information supersedes what came in.
pub fn final_ec(
    views: &[BlockView],
    last_piece: Piece,
    full: &[u64],
    incoming: &SideInfo,
    choice: DecoderChoice,
) -> Result<(Vec<Pauli>, DecoderOutcome)> {
    let cmask = |v: &BlockView| (1u64 << v.constant.len()) - 1;
    let constant: Vec<u64> = views.iter().zip(full).map(|(v, s)| s & cmask(v)).collect();
    let step = match choice {
        DecoderChoice::Parsec => parsec_step(views, last_piece, &constant, &mut |j| {
            Ok(full[j] >> views[j].constant.len())
        })?,
        DecoderChoice::CssParsec => css_parsec_step(views, last_piece, &constant)?,
        DecoderChoice::Lookup => DecoderOutcome {
            case: TriggerCase::NoTrigger,
            corrections: identity_corrections(views),
            forward: SideInfo::empty(views.len()),
            nonconstant_requested: false,
        },
    };
    let located = if step.forward.is_empty() { incoming } else { &step.forward };
    let mut out = Vec::with_capacity(views.len());
    for (j, v) in views.iter().enumerate() {
        let c = step.corrections[j];
        let s = full[j] ^ v.full_syndrome(&c);
        let l = located.located[j];
        // More located qubits than the distance allows cannot be decoded as
        // erasures; the block then gets the plain lookup like any other.
        let rest = if l != 0 && (l.count_ones() as usize) < v.distance {
            located_decode_with(v.lookup.gens(), &v.stabilizer, s, l)?
        } else {
            v.lookup.decode(s)
        };
        out.push(rest * c);
    }
    Ok((out, step))
}

/// `final_ec` on a Pauli branch (local per block) with measured bits
/// toggled by `flips`.
pub fn final_ec_on_branch(
    views: &[BlockView],
    last_piece: Piece,
    branch: &[Pauli],
    incoming: &SideInfo,
    choice: DecoderChoice,
    flips: &[u64],
) -> Result<(Vec<Pauli>, DecoderOutcome)> {
    let full: Vec<u64> = views
        .iter()
        .zip(branch)
        .zip(flips)
        .map(|((v, e), f)| v.full_syndrome(e) ^ f)
        .collect();
    final_ec(views, last_piece, &full, incoming, choice)
}

/// Whether `residual` (local) is equivalent, modulo the stabilizer, to an
/// error of weight at most `(d - 1) / 2`.
pub fn is_correctable(view: &BlockView, residual: &Pauli) -> bool {
    let r = view.lookup.decode(view.full_syndrome(residual));
    r.weight() <= (view.distance - 1) / 2 && view.stabilizer.contains_up_to_phase(&(r * *residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(name: &str) -> StabilizerCode {
        StabilizerCode::builtin(name).unwrap()
    }

    fn singles(n: usize) -> Vec<Pauli> {
        (0..n).flat_map(|q| ['X', 'Y', 'Z'].map(|l| Pauli::single(n, q, l))).collect()
    }

    #[test]
    fn lookup_corrects_single_errors() {
        for name in ["five", "steane7", "shor9"] {
            let c = code(name);
            let span = c.stabilizer().span();
            let t = LookupTable::new(c.gens()).unwrap();
            assert_eq!(lookup_decode(&c, 0).unwrap(), Pauli::identity(c.n()));
            for e in singles(c.n()) {
                let r = t.decode(t.syndrome(&e));
                assert!(span.contains_up_to_phase(&(r * e)), "{name} {e}");
            }
        }
        // Perfect code: every single error is its own table entry.
        let c = code("five");
        let t = LookupTable::new(c.gens()).unwrap();
        for e in singles(5) {
            assert_eq!(t.decode(t.syndrome(&e)).unsigned(), e.unsigned());
        }
    }

    #[test]
    fn located_decoding() {
        let c = code("five");
        let e: Pauli = "IIZIZ".parse().unwrap();
        let s = syndrome(&e, c.gens());
        let r = located_erasure_decode(&c, s, 0b10100).unwrap();
        assert!(c.stabilizer().span().contains_up_to_phase(&(r * e)));
        assert_eq!(located_erasure_decode(&c, 0, 0b10100).unwrap(), Pauli::identity(5));
        assert!(located_erasure_decode(&c, s, 0b10110).is_err());

        let c = code("steane7");
        let span = c.stabilizer().span();
        let on = 0b1100000;
        for code_ in 0..16u64 {
            let e = Pauli::from_bits(7, (code_ & 1) << 5 | (code_ >> 1 & 1) << 6, (code_ >> 2 & 1) << 5 | (code_ >> 3 & 1) << 6, 0);
            let r = located_erasure_decode(&c, syndrome(&e, c.gens()), on).unwrap();
            assert!(span.contains_up_to_phase(&(r * e)), "{e}");
        }
    }

    fn five_prime_view(offset: usize) -> BlockView {
        let c = code("five_prime");
        BlockView::new("A", offset, &c, 0b10101).unwrap()
    }

    #[test]
    fn block_view_of_five_prime() {
        let v = five_prime_view(0);
        assert_eq!(v.constant.len(), 2);
        assert_eq!(v.nonconstant.len(), 2);
        assert!(v.is_correcting());
        assert!(v.constant.iter().all(|g| g.x_bits() & v.active == 0));
    }

    #[test]
    fn steane_separates_idle_errors() {
        let c = code("steane7");
        let v = BlockView::new("A", 0, &c, 0b1110000).unwrap();
        assert!(v.separates_idle());
        // X on idle qubit 2 is detected but not contagious.
        let s = v.constant_syndrome(&Pauli::single(7, 1, 'X'));
        assert!(s != 0 && v.pinpoint(s).is_none());
    }

    #[test]
    fn parsec_cases() {
        let views = vec![five_prime_view(0), five_prime_view(5)];
        let piece = vec![vec![0, 5], vec![2, 7]];
        let mut never = |_: usize| -> Result<u64> { panic!("nonconstant access without trigger") };
        let out = parsec_step(&views, &piece, &[0, 0], &mut never).unwrap();
        assert_eq!(out.case, TriggerCase::NoTrigger);
        assert!(out.forward.is_empty() && !out.nonconstant_requested);

        // X on A0 and B5 from one gate fault: both blocks fire.
        let sa = views[0].constant_syndrome(&Pauli::single(5, 0, 'X'));
        let sb = views[1].constant_syndrome(&Pauli::single(5, 0, 'X'));
        let out = parsec_step(&views, &piece, &[sa, sb], &mut never).unwrap();
        assert_eq!(out.case, TriggerCase::MultiBlockTrigger);
        assert_eq!(out.corrections[0], Pauli::single(5, 0, 'X'));
        assert_eq!(out.forward.located, vec![0b00001, 0b00001]);

        // Y on idle qubit 1 of A: single trigger, exact correction, no spread.
        let e = Pauli::single(5, 1, 'Y');
        let s = views[0].full_syndrome(&e);
        let cm = (1 << views[0].constant.len()) - 1;
        let mut asked = Vec::new();
        let mut access = |j: usize| {
            asked.push(j);
            Ok(s >> views[0].constant.len())
        };
        let out = parsec_step(&views, &piece, &[s & cm, 0], &mut access).unwrap();
        assert_eq!(out.case, TriggerCase::SingleBlockTrigger);
        assert_eq!(asked, vec![0]);
        assert!(views[0].stabilizer.contains_up_to_phase(&(out.corrections[0] * e)));
        assert!(out.forward.is_empty());
    }

    #[test]
    fn css_parsec_defers_idle_errors() {
        let c = code("steane7");
        let views: Vec<BlockView> = (0..3).map(|j| BlockView::new("X", 7 * j, &c, 0b1110000).unwrap()).collect();
        let piece = vec![vec![4, 11, 18], vec![4, 12, 19]];
        let idle = views[0].constant_syndrome(&Pauli::single(7, 1, 'X'));
        let out = css_parsec_step(&views, &piece, &[idle, 0, 0]).unwrap();
        assert!(out.corrections.iter().all(|c| c.is_identity()));
        let z = views[0].constant_syndrome(&Pauli::single(7, 4, 'Z'));
        assert_eq!(z, 0);
        let x4 = views[0].constant_syndrome(&Pauli::single(7, 4, 'X'));
        let out = css_parsec_step(&views, &piece, &[x4, 0, 0]).unwrap();
        assert_eq!(out.corrections[0], Pauli::single(7, 4, 'X'));
        assert_eq!(out.forward.located, vec![1 << 4, 0b0110000, 0b0110000]);
        assert!(!out.nonconstant_requested);
    }
}
