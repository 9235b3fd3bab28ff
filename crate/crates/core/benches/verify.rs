use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use pft_core::circuit::{five_cz_two_piece, plan_pieces, synth_gamma, PieceableCircuit};
use pft_core::code::StabilizerCode;
use pft_core::par;
use pft_core::parsec::DecoderChoice;
use pft_core::verify::{verify_1ft, Options};

fn five_ccz() -> PieceableCircuit {
    let code = StabilizerCode::builtin("five_prime").unwrap();
    let p = code.logical_z()[0];
    let rr = synth_gamma(&vec![(code, p); 3], "ZZZ").unwrap();
    rr.with_pieces(plan_pieces(&rr).unwrap().pieces).unwrap()
}

fn steane_ccz() -> PieceableCircuit {
    let code = StabilizerCode::builtin("steane7").unwrap();
    let p = pft_core::pauli::Pauli::z_on(7, &[4, 5, 6]);
    let rr = synth_gamma(&vec![(code, p); 3], "ZZZ").unwrap();
    rr.with_pieces(plan_pieces(&rr).unwrap().pieces).unwrap()
}

fn bench_verify(c: &mut Criterion) {
    let cases = [
        ("cz5", five_cz_two_piece(), DecoderChoice::Parsec),
        ("ccz5", five_ccz(), DecoderChoice::Parsec),
        ("ccz7", steane_ccz(), DecoderChoice::CssParsec),
    ];
    let mut g = c.benchmark_group("verify_1ft");
    g.sample_size(10);
    for (name, pc, choice) in &cases {
        for (mode, workers) in [("sequential", Some(1)), ("parallel", None)] {
            g.bench_with_input(BenchmarkId::new(mode, name), pc, |b, pc| {
                let opts = Options { workers, traces: false };
                b.iter(|| {
                    let r = par::with_workers(workers, || verify_1ft(black_box(pc), *choice, &opts).unwrap());
                    assert!(r.pass);
                    r.fault_sites
                })
            });
        }
    }
    g.finish();
}

criterion_group!(benches, bench_verify);
criterion_main!(benches);
