//! Symbolic replay of one fault through a pieced circuit and its decoders.

use serde::Serialize;

use crate::circuit::{Circuit, Component, EcStage, Op, PieceableCircuit};
use crate::clifford::LocalClifford;
use crate::errprop::{
    enumerate_faults, expand_branches, input_faults, syndrome_of_dressed, DressedError, Fault, FaultLocation,
    FaultSite, StabilizerRole,
};
use crate::parsec::{
    css_parsec_step, css_precondition, final_ec_on_branch, is_correctable, parsec_step, BlockView, DecoderChoice,
    DecoderOutcome, SideInfo, TriggerCase,
};
use crate::pauli::Pauli;
use crate::{Error, Result};

/// Pair bound for branch expansion at the final round.
pub const VERIFY_MAX_PAIRS: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    LogicalFailure { branch: String, block: String, residual: String },
    DecodeFailure { reason: String },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// One error-correction round as the decoder saw it.
#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    pub stage: EcStage,
    pub case: TriggerCase,
    pub syndromes: Vec<u64>,
    pub corrections: Vec<String>,
    pub forwarded: Vec<u64>,
    pub nonconstant_requested: bool,
    /// Final rounds only: the Pauli branch decoded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteRun {
    pub verdict: Verdict,
    pub rounds: Vec<RoundRecord>,
}

/// A pieced circuit prepared for fault replay.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub pc: PieceableCircuit,
    pub circuit: Circuit,
    pub views: Vec<BlockView>,
    pub choice: DecoderChoice,
    pub max_pairs: usize,
    pub(crate) frame: LocalClifford,
    pub(crate) epilogue_start: usize,
    /// Per block, constant rows on the full register.
    pub(crate) constant: Vec<Vec<Pauli>>,
    /// Per intermediate round and block, nonconstant rows dressed by the
    /// gates applied so far.
    pub(crate) dressed: Vec<Vec<Vec<DressedError>>>,
    pub sites: Vec<FaultSite>,
}

impl Pipeline {
    pub fn new(pc: &PieceableCircuit, choice: DecoderChoice) -> Result<Self> {
        let views: Vec<BlockView> = pc.blocks.iter().map(BlockView::from_gamma).collect::<Result<_>>()?;
        match choice {
            DecoderChoice::Parsec => {
                if let Some(v) = views.iter().find(|v| !v.is_correcting()) {
                    return Err(Error::Unsupported(format!(
                        "block {} has no error-correcting constant stabilizer",
                        v.name
                    )));
                }
            }
            DecoderChoice::CssParsec => {
                if !css_precondition(&views) {
                    return Err(Error::Unsupported(
                        "constant stabilizers do not separate contagious from idle errors".into(),
                    ));
                }
            }
            DecoderChoice::Lookup => {}
        }
        let n = pc.n_total();
        let circuit = pc.to_circuit();
        let embed = |v: &BlockView, p: &Pauli| p.embed(n, v.offset);
        let constant: Vec<Vec<Pauli>> = views.iter().map(|v| v.constant.iter().map(|g| embed(v, g)).collect()).collect();
        let mut dressed = Vec::new();
        let mut rows: Vec<Vec<DressedError>> = views
            .iter()
            .map(|v| v.nonconstant.iter().map(|g| DressedError::new(embed(v, g))).collect())
            .collect();
        for piece in &pc.pieces[..pc.pieces.len().saturating_sub(1)] {
            for g in piece {
                let op = Component::diagonal(g.clone()).op;
                for r in rows.iter_mut().flatten() {
                    *r = r.conjugate(&op, g)?;
                }
            }
            dressed.push(rows.clone());
        }
        let epilogue_start = circuit
            .components
            .iter()
            .rposition(|c| c.op.is_diagonal_multi())
            .map_or(0, |i| i + 1);
        let constant_bits: usize = views.iter().map(|v| v.constant.len()).sum();
        let full_bits: usize = views.iter().map(|v| v.constant.len() + v.nonconstant.len()).sum();
        let mut sites = input_faults(&circuit);
        sites.extend(enumerate_faults(&circuit, &|i| match &circuit.components[i].op {
            Op::Ec {
                stage: EcStage::Intermediate,
                ..
            } if choice != DecoderChoice::Lookup => constant_bits,
            Op::Ec {
                stage: EcStage::Final, ..
            } => full_bits,
            _ => 0,
        }));
        Ok(Self {
            pc: pc.clone(),
            frame: pc.frame(),
            circuit,
            views,
            choice,
            max_pairs: VERIFY_MAX_PAIRS,
            epilogue_start,
            constant,
            dressed,
            sites,
        })
    }

    pub fn n(&self) -> usize {
        self.pc.n_total()
    }

    /// Splits a flat flip index into (block, bit) given per-block widths.
    pub(crate) fn flip_target(widths: impl Iterator<Item = usize>, mut b: usize) -> Option<(usize, usize)> {
        for (j, w) in widths.enumerate() {
            if b < w {
                return Some((j, b));
            }
            b -= w;
        }
        None
    }

    pub(crate) fn constant_flips(&self, flip: Option<usize>) -> Vec<u64> {
        let mut out = vec![0; self.views.len()];
        if let Some((j, k)) = flip.and_then(|b| Self::flip_target(self.views.iter().map(|v| v.constant.len()), b)) {
            out[j] = 1 << k;
        }
        out
    }

    pub(crate) fn full_flips(&self, flip: Option<usize>) -> Vec<u64> {
        let mut out = vec![0; self.views.len()];
        let widths = self.views.iter().map(|v| v.constant.len() + v.nonconstant.len());
        if let Some((j, k)) = flip.and_then(|b| Self::flip_target(widths, b)) {
            out[j] = 1 << k;
        }
        out
    }

    pub(crate) fn embed_corrections(&self, local: &[Pauli]) -> Pauli {
        let n = self.n();
        local
            .iter()
            .zip(&self.views)
            .fold(Pauli::identity(n), |acc, (c, v)| acc * c.embed(n, v.offset))
    }

    /// Physical Pauli fault after component `i`, in the frame the replay
    /// tracks errors in.
    pub(crate) fn fault_in_frame(&self, i: Option<usize>, p: &Pauli) -> Pauli {
        // A prologue gate completes the frame change on its qubit, so faults
        // after it are already in the tracked frame.
        match i {
            Some(i) if i < self.epilogue_start => *p,
            _ => self.frame.conjugate(p),
        }
    }

    pub(crate) fn record(stage: EcStage, syndromes: Vec<u64>, out: &DecoderOutcome, branch: Option<String>) -> RoundRecord {
        RoundRecord {
            stage,
            case: out.case,
            syndromes,
            corrections: out.corrections.iter().map(|c| c.to_string()).collect(),
            forwarded: out.forward.located.clone(),
            nonconstant_requested: out.nonconstant_requested,
            branch,
        }
    }

    /// Replays `site` (or the fault-free circuit) through every round.
    pub fn run(&self, site: Option<&FaultSite>) -> SiteRun {
        let mut rounds = Vec::new();
        let verdict = self
            .run_inner(site, &mut rounds)
            .unwrap_or_else(|e| Verdict::DecodeFailure { reason: e.to_string() });
        SiteRun { verdict, rounds }
    }

    fn run_inner(&self, site: Option<&FaultSite>, rounds: &mut Vec<RoundRecord>) -> Result<Verdict> {
        let n = self.n();
        let mut err = DressedError::identity(n);
        let mut side = SideInfo::empty(self.views.len());
        let (at, pauli, flip) = match site {
            None => (None, None, None),
            Some(FaultSite { location, fault }) => {
                let at = match location {
                    FaultLocation::Input => None,
                    FaultLocation::After(i) => Some(*i),
                };
                match fault {
                    Fault::Pauli(p) => (at, Some(*p), None),
                    Fault::Flip(b) => (at, None, Some(*b)),
                }
            }
        };
        if let (Some(FaultSite { location: FaultLocation::Input, .. }), Some(p)) = (site, pauli) {
            err = err.then(&self.frame.conjugate(&p));
        }
        let mut round = 0;
        for (i, comp) in self.circuit.components.iter().enumerate() {
            let here = at == Some(i);
            let flip_here = if here { flip } else { None };
            match &comp.op {
                Op::Clifford(_) | Op::Segment { .. } => {}
                op if op.is_diagonal_multi() => err = err.conjugate(op, &comp.qubits)?,
                Op::Ec {
                    stage: EcStage::Intermediate,
                    ..
                } => {
                    self.intermediate(round, &mut err, &mut side, flip_here, rounds)?;
                    round += 1;
                }
                Op::Ec {
                    stage: EcStage::Final, ..
                } => {
                    let after = if here { pauli.map(|p| self.frame.conjugate(&p)) } else { None };
                    return self.final_round(&err, &side, flip_here, after, rounds);
                }
                other => return Err(Error::Unsupported(format!("{other:?} in a pieced circuit"))),
            }
            if here {
                if let Some(p) = pauli {
                    err = err.then(&self.fault_in_frame(Some(i), &p));
                }
            }
        }
        Err(Error::Circuit("no final error correction".into()))
    }

    fn intermediate(
        &self,
        round: usize,
        err: &mut DressedError,
        side: &mut SideInfo,
        flip: Option<usize>,
        rounds: &mut Vec<RoundRecord>,
    ) -> Result<()> {
        if self.choice == DecoderChoice::Lookup {
            return Ok(());
        }
        let flips = self.constant_flips(flip);
        let mut constant = Vec::with_capacity(self.views.len());
        for (j, rows) in self.constant.iter().enumerate() {
            let mut s = 0u64;
            for (k, g) in rows.iter().enumerate() {
                if syndrome_of_dressed(err, &DressedError::new(*g), StabilizerRole::Constant)? {
                    s |= 1 << k;
                }
            }
            constant.push(s ^ flips[j]);
        }
        let piece = &self.pc.pieces[round];
        let current = err.clone();
        let out = match self.choice {
            DecoderChoice::Parsec => {
                let dressed = &self.dressed[round];
                parsec_step(&self.views, piece, &constant, &mut |j| {
                    let mut s = 0u64;
                    for (k, t) in dressed[j].iter().enumerate() {
                        let role = StabilizerRole::Nonconstant { guaranteed: true };
                        if syndrome_of_dressed(&current, t, role)? {
                            s |= 1 << k;
                        }
                    }
                    Ok(s)
                })?
            }
            _ => css_parsec_step(&self.views, piece, &constant)?,
        };
        *err = err.then(&self.embed_corrections(&out.corrections));
        if !out.forward.is_empty() {
            *side = out.forward.clone();
        }
        rounds.push(Self::record(EcStage::Intermediate, constant, &out, None));
        Ok(())
    }

    fn final_round(
        &self,
        err: &DressedError,
        side: &SideInfo,
        flip: Option<usize>,
        after: Option<Pauli>,
        rounds: &mut Vec<RoundRecord>,
    ) -> Result<Verdict> {
        let branches = expand_branches(err, self.max_pairs)?;
        let flips = self.full_flips(flip);
        let last = self.pc.pieces.last().map(|p| p.as_slice()).unwrap_or(&[]);
        for b in &branches.paulis {
            let locals: Vec<Pauli> = self.views.iter().map(|v| v.local(b)).collect();
            let (corr, out) = match final_ec_on_branch(&self.views, last, &locals, side, self.choice, &flips) {
                Ok(r) => r,
                Err(e) => {
                    return Ok(Verdict::DecodeFailure {
                        reason: format!("branch {b}: {e}"),
                    })
                }
            };
            let syndromes = self
                .views
                .iter()
                .zip(&locals)
                .zip(&flips)
                .map(|((v, e), f)| v.full_syndrome(e) ^ f)
                .collect();
            rounds.push(Self::record(EcStage::Final, syndromes, &out, Some(b.to_string())));
            for (j, v) in self.views.iter().enumerate() {
                let mut residual = corr[j] * locals[j];
                if let Some(p) = after {
                    residual = v.local(&p) * residual;
                }
                if !is_correctable(v, &residual) {
                    return Ok(Verdict::LogicalFailure {
                        branch: b.to_string(),
                        block: v.name.clone(),
                        residual: residual.to_string(),
                    });
                }
            }
        }
        Ok(Verdict::Pass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::five_cz_two_piece;

    #[test]
    fn fault_free_run_passes_without_triggers() {
        let p = Pipeline::new(&five_cz_two_piece(), DecoderChoice::Parsec).unwrap();
        let run = p.run(None);
        assert_eq!(run.verdict, Verdict::Pass);
        assert_eq!(run.rounds[0].case, TriggerCase::NoTrigger);
        assert!(run.rounds.iter().all(|r| !r.nonconstant_requested));
    }

    #[test]
    fn site_counts() {
        let p = Pipeline::new(&five_cz_two_piece(), DecoderChoice::Parsec).unwrap();
        let framed = p.frame.0.iter().filter(|c| !c.is_identity()).count();
        // inputs, prologue and epilogue, gates, intermediate EC, final EC
        let want = 30 + 2 * 3 * framed + 9 * 15 + (30 + 4) + (30 + 8);
        assert_eq!(p.sites.len(), want);
    }
}
