//! Logical-action checks, exhaustive single-fault verification, piece search
//! and the non-stabilizer detector.

mod action;
mod nonstab;
mod oracle;
mod pipeline;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::Serialize;

use crate::circuit::{EcStage, Op, PieceableCircuit};
use crate::errprop::{syndrome_of_dressed, DressedError, Fault, FaultLocation, FaultSite, StabilizerRole};
use crate::par;
use crate::parsec::{DecoderChoice, TriggerCase};
use crate::{Error, Result};

pub use action::{check_logical_action, conjugate_through, oracle_check, tableau_check, LogicalActionReport, OracleActionCheck, TableauCheck, AMPLITUDE_TOL};
pub use nonstab::{detect_nonstabilizer, generators_at_cut, NonstabilizerReport, ProjectorCheck, MAX_DECOMPOSITION_QUBITS};
pub use oracle::{oracle_agreement, DenseReplay, OracleAgreement, OracleCheck};
pub use search::{search_min_pieces, PieceSearch, Refutation, SearchOutcome, MAX_SEARCH_GATES};
pub use pipeline::{Pipeline, RoundRecord, SiteRun, Verdict, VERIFY_MAX_PAIRS};

#[derive(Clone, Debug, Default, Serialize)]
pub struct Options {
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Keep the round-by-round trace of failing sites.
    pub traces: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SiteFailure {
    pub site: usize,
    pub location: String,
    pub fault: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<RoundRecord>>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RoundStats {
    pub multi_block_trigger: usize,
    pub single_block_trigger: usize,
    pub no_trigger: usize,
    pub nonconstant_requests: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub circuit: String,
    pub decoder: DecoderChoice,
    pub pieces: usize,
    pub fault_sites: usize,
    pub failures: Vec<SiteFailure>,
    /// Intermediate rounds over all sites.
    pub rounds: RoundStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syndrome_usage: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    pub pass: bool,
    /// Per-site verdicts in site order.
    #[serde(skip)]
    pub verdicts: Vec<Verdict>,
}

pub fn describe_site(p: &Pipeline, s: &FaultSite) -> (String, String) {
    let loc = match s.location {
        FaultLocation::Input => "input".to_string(),
        FaultLocation::After(i) => {
            let c = &p.circuit.components[i];
            format!("after #{i} {} {:?}", c.op.gate_name(), c.qubits)
        }
    };
    let fault = match &s.fault {
        Fault::Pauli(q) => q.to_string(),
        Fault::Flip(b) => format!("flip bit {b}"),
    };
    (loc, fault)
}

/// Runs every single-fault site of `p` and collects the verdicts.
pub fn verify_pipeline(p: &Pipeline, id: &str, opts: &Options) -> VerificationReport {
    let start = Instant::now();
    let idx: Vec<usize> = (0..p.sites.len()).collect();
    let runs = par::with_workers(opts.workers, || par::map(&idx, |&i| p.run(Some(&p.sites[i]))));
    let mut rounds = RoundStats::default();
    let mut failures = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        for r in run.rounds.iter().filter(|r| r.stage == EcStage::Intermediate) {
            match r.case {
                TriggerCase::MultiBlockTrigger => rounds.multi_block_trigger += 1,
                TriggerCase::SingleBlockTrigger => rounds.single_block_trigger += 1,
                TriggerCase::NoTrigger => rounds.no_trigger += 1,
            }
            rounds.nonconstant_requests += r.nonconstant_requested as usize;
        }
        if !run.verdict.passed() {
            let (location, fault) = describe_site(p, &p.sites[i]);
            failures.push(SiteFailure {
                site: i,
                location,
                fault,
                verdict: run.verdict.clone(),
                trace: opts.traces.then(|| run.rounds.clone()),
            });
        }
    }
    VerificationReport {
        circuit: id.to_string(),
        decoder: p.choice,
        pieces: p.pc.pieces.len(),
        fault_sites: p.sites.len(),
        pass: failures.is_empty(),
        failures,
        rounds,
        syndrome_usage: None,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
        verdicts: runs.into_iter().map(|r| r.verdict).collect(),
    }
}

/// Distinct nontrivial syndromes at intermediate cut `cut` (1-based) over
/// the single Pauli faults since the previous round, reading every generator.
pub fn syndrome_usage(p: &Pipeline, cut: usize) -> Result<usize> {
    let ecs: Vec<usize> = p
        .circuit
        .components
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c.op, Op::Ec { stage: EcStage::Intermediate, .. }))
        .map(|(i, _)| i)
        .collect();
    if cut == 0 || cut > ecs.len() {
        return Err(Error::Circuit(format!("no intermediate cut {cut}")));
    }
    let stop = ecs[cut - 1];
    let start = if cut == 1 { None } else { Some(ecs[cut - 2]) };
    let n = p.n();
    let mut seen = BTreeSet::new();
    for site in &p.sites {
        let Fault::Pauli(q) = &site.fault else { continue };
        let (mut err, from) = match site.location {
            FaultLocation::Input if cut == 1 => (DressedError::new(p.frame.conjugate(q)), 0),
            FaultLocation::After(i) if i < stop && start.is_none_or(|s| i >= s) => {
                (DressedError::new(p.fault_in_frame(Some(i), q)), i + 1)
            }
            _ => continue,
        };
        for c in &p.circuit.components[from..stop] {
            if c.op.is_diagonal_multi() {
                err = err.conjugate(&c.op, &c.qubits)?;
            }
        }
        let mut word = Vec::with_capacity(p.views.len());
        for (j, rows) in p.constant.iter().enumerate() {
            let mut s = 0u64;
            let dressed = &p.dressed[cut - 1][j];
            for (k, g) in rows.iter().map(|g| DressedError::new(*g)).chain(dressed.iter().cloned()).enumerate() {
                let role = if k < rows.len() {
                    StabilizerRole::Constant
                } else {
                    StabilizerRole::Nonconstant { guaranteed: true }
                };
                if syndrome_of_dressed(&err, &g, role)? {
                    s |= 1 << k;
                }
            }
            word.push(s);
        }
        if word.iter().any(|&s| s != 0) {
            seen.insert(word);
        }
    }
    debug_assert!(n > 0);
    Ok(seen.len())
}

/// Exhaustive single-fault check of a pieced circuit under `choice`.
pub fn verify_1ft(pc: &PieceableCircuit, choice: DecoderChoice, opts: &Options) -> Result<VerificationReport> {
    let p = Pipeline::new(pc, choice)?;
    let usage = if p.pc.pieces.len() > 1 { syndrome_usage(&p, 1).ok() } else { None };
    let id = pc
        .blocks
        .iter()
        .map(|b| b.code.label())
        .collect::<Vec<_>>()
        .join("x");
    let mut report = verify_pipeline(&p, &format!("{id}/{}-piece", pc.pieces.len()), opts);
    report.syndrome_usage = usage;
    Ok(report)
}

/// Failing sites grouped by the kind of fault, for summaries.
pub fn failure_histogram(r: &VerificationReport) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for f in &r.failures {
        let key = f.location.split_whitespace().nth(2).unwrap_or("input").to_string();
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{five_cz_two_piece, plan_pieces, synth_gamma};
    use crate::errprop::FaultLocation;
    use crate::code::StabilizerCode;

    fn five_ccz() -> PieceableCircuit {
        let code = StabilizerCode::builtin("five_prime").unwrap();
        let p = code.logical_z()[0];
        let rr = synth_gamma(&vec![(code, p); 3], "ZZZ").unwrap();
        let plan = plan_pieces(&rr).unwrap();
        rr.with_pieces(plan.pieces).unwrap()
    }

    fn steane_ccz() -> PieceableCircuit {
        let code = StabilizerCode::builtin("steane7").unwrap();
        let p = crate::pauli::Pauli::z_on(7, &[4, 5, 6]);
        let rr = synth_gamma(&vec![(code, p); 3], "ZZZ").unwrap();
        let plan = plan_pieces(&rr).unwrap();
        rr.with_pieces(plan.pieces).unwrap()
    }

    fn passes(pc: &PieceableCircuit, choice: DecoderChoice) -> VerificationReport {
        verify_1ft(pc, choice, &Options::default()).unwrap()
    }

    #[test]
    fn five_cz_two_pieces_pass() {
        let r = passes(&five_cz_two_piece(), DecoderChoice::Parsec);
        assert!(r.pass, "{:?}", r.failures.first());
        assert_eq!(r.pieces, 2);
        assert!(r.rounds.multi_block_trigger > 0 && r.rounds.single_block_trigger > 0);
    }

    #[test]
    fn cz_first_cut_uses_84_syndromes() {
        let p = Pipeline::new(&five_cz_two_piece(), DecoderChoice::Parsec).unwrap();
        let rows: usize = p.views.iter().map(|v| v.constant.len() + v.nonconstant.len()).sum();
        assert_eq!(rows, 8);
        assert_eq!(syndrome_usage(&p, 1).unwrap(), 84);
        assert!(syndrome_usage(&p, 2).is_err());
    }

    #[test]
    fn syndrome_census_by_plain_propagation() {
        // Physical circuit, physical generators, Pauli conjugation only.
        use crate::code::conjugate_cz;
        use crate::errprop::paulis_on;
        let pc = five_cz_two_piece();
        let c = pc.to_circuit();
        let n = pc.n_total();
        let stop = c.components.iter().position(|x| matches!(x.op, Op::Ec { .. })).unwrap();
        let step = |p: crate::pauli::Pauli, comp: &crate::circuit::Component| match &comp.op {
            Op::Clifford(g) => g.conjugate(&p, comp.qubits[0]),
            Op::Cz => conjugate_cz(&p, comp.qubits[0], comp.qubits[1]),
            _ => unreachable!(),
        };
        let through = |p: crate::pauli::Pauli, from: usize| c.components[from..stop].iter().fold(p, &step);
        let gens: Vec<_> = pc
            .blocks
            .iter()
            .flat_map(|b| b.code.gens().iter().map(move |g| g.embed(n, b.offset)))
            .map(|g| through(g, 0))
            .collect();
        let mut faults: Vec<(crate::pauli::Pauli, usize)> = Vec::new();
        for q in 0..n {
            faults.extend(paulis_on(n, &[q]).into_iter().map(|e| (e, 0)));
        }
        for (i, comp) in c.components[..stop].iter().enumerate() {
            faults.extend(paulis_on(n, &comp.qubits).into_iter().map(|e| (e, i + 1)));
        }
        let mut seen = BTreeSet::new();
        for (e, from) in faults {
            let e = through(e, from);
            let s = crate::pauli::syndrome(&e, &gens);
            if s != 0 {
                seen.insert(s);
            }
        }
        assert_eq!(seen.len(), 84);
    }

    #[test]
    fn skipping_intermediate_decoding_fails() {
        let r = passes(&five_cz_two_piece(), DecoderChoice::Lookup);
        assert!(!r.pass);
        let r = passes(&five_cz_two_piece().unpieced(), DecoderChoice::Parsec);
        assert!(!r.pass);
    }

    #[test]
    fn five_ccz_four_pieces_pass_and_unpieced_fails() {
        let pc = five_ccz();
        assert_eq!(pc.pieces.len(), 4);
        let r = passes(&pc, DecoderChoice::Parsec);
        assert!(r.pass, "{:?}", r.failures.first());
        // EC faults are part of the census: every EC component has sites.
        let p = Pipeline::new(&pc, DecoderChoice::Parsec).unwrap();
        let ec_sites = p
            .sites
            .iter()
            .filter(|s| matches!(s.location, FaultLocation::After(i) if matches!(p.circuit.components[i].op, crate::circuit::Op::Ec { .. })))
            .count();
        assert!(ec_sites > 0);

        let r = passes(&pc.unpieced(), DecoderChoice::Parsec);
        let witness = r
            .failures
            .iter()
            .find(|f| matches!(f.verdict, Verdict::LogicalFailure { .. }))
            .expect("a logical failure");
        assert!(witness.location.contains("CCZ") || witness.location == "input");
    }

    #[test]
    fn steane_ccz_never_reads_nonconstant_rows() {
        let r = passes(&steane_ccz(), DecoderChoice::CssParsec);
        assert!(r.pass, "{:?}", r.failures.first());
        assert_eq!(r.pieces, 4);
        assert_eq!(r.rounds.nonconstant_requests, 0);
    }

    #[test]
    fn steane_21_ccz_two_pieces_pass() {
        let pc = crate::circuit::Ccz21Layout::reference().pieceable().unwrap();
        assert_eq!(pc.gate_count(), 21);
        let r = passes(&pc, DecoderChoice::CssParsec);
        assert!(r.pass, "{:?}", r.failures.first());
        assert_eq!(r.pieces, 2);
        assert_eq!(r.rounds.nonconstant_requests, 0);
    }

    #[test]
    fn decoder_contracts_hold_on_every_site() {
        for (pc, choice) in [
            (five_ccz(), DecoderChoice::Parsec),
            (steane_ccz(), DecoderChoice::CssParsec),
            (five_cz_two_piece(), DecoderChoice::Parsec),
        ] {
            let p = Pipeline::new(&pc, choice).unwrap();
            for site in &p.sites {
                for r in p.run(Some(site)).rounds {
                    if r.case == TriggerCase::NoTrigger || choice == DecoderChoice::CssParsec {
                        assert!(!r.nonconstant_requested, "{r:?}");
                    }
                    for (v, l) in p.views.iter().zip(&r.forwarded) {
                        assert!((l.count_ones() as usize) < v.distance, "{r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn verdicts_ignore_order_and_workers() {
        let p = Pipeline::new(&five_ccz().unpieced(), DecoderChoice::Parsec).unwrap();
        let one = verify_pipeline(&p, "x", &Options { workers: Some(1), traces: false });
        let four = verify_pipeline(&p, "x", &Options { workers: Some(4), traces: false });
        assert_eq!(one.verdicts, four.verdicts);
        let reversed: Vec<Verdict> = p.sites.iter().rev().map(|s| p.run(Some(s)).verdict).collect();
        assert!(reversed.into_iter().rev().eq(one.verdicts.iter().cloned()));
        assert_eq!(
            serde_json::to_string(&one.failures).unwrap(),
            serde_json::to_string(&four.failures).unwrap()
        );
    }

    #[test]
    fn dense_replay_agrees_everywhere_on_cz() {
        for (pc, ch) in [
            (five_cz_two_piece(), DecoderChoice::Parsec),
            (five_cz_two_piece(), DecoderChoice::Lookup),
            (five_cz_two_piece().unpieced(), DecoderChoice::Parsec),
        ] {
            let p = Pipeline::new(&pc, ch).unwrap();
            let r = verify_pipeline(&p, "cz", &Options::default());
            let a = oracle_agreement(&p, &r.verdicts, 1.0, 3).unwrap();
            assert_eq!(a.checks.len(), p.sites.len());
            assert!(a.agree, "{:?}", a.mismatches().next());
        }
    }

    #[test]
    fn dense_replay_agrees_on_sampled_ccz_sites() {
        for pc in [five_ccz(), five_ccz().unpieced()] {
            let p = Pipeline::new(&pc, DecoderChoice::Parsec).unwrap();
            let r = verify_pipeline(&p, "ccz", &Options::default());
            let a = oracle_agreement(&p, &r.verdicts, 0.1, 11).unwrap();
            assert_eq!(a.checks.len(), (p.sites.len() as f64 * 0.1).ceil() as usize);
            assert!(a.agree, "{:?}", a.mismatches().next());
        }
    }

    #[test]
    fn dense_replay_of_clean_run_passes() {
        let p = Pipeline::new(&five_ccz(), DecoderChoice::Parsec).unwrap();
        assert!(DenseReplay::new(&p, 1).unwrap().passes(None).unwrap());
    }
}
