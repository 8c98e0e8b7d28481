use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use smoothsum::characters::DirichletCharacter;
use smoothsum::complete_sums::{brute_interval_sum, SumInstance};
use smoothsum::differencing::{diffed_complete_bound, diffed_local_max, ShiftSystem};
use smoothsum::pipeline::{certified_incomplete_bound, recompute_from_trace};
use smoothsum::RationalFunction;
use num_rational::Ratio;

fn parse(s: &str) -> RationalFunction {
    RationalFunction::parse(s).unwrap()
}

#[test]
fn differenced_bound_dominates_at_larger_primes() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let fs = ["x", "x^2+1", "(x+1)/(x-2)", "x^3-x+4"];
    let gs = ["0", "x^2", "x^3+x", "1/(x+3)", "x^4/(x^2+1)"];
    let (mut checked, mut nontrivial) = (0, 0);
    for _ in 0..60 {
        let (p, m) = [(1009u64, 1u32), (2003, 1), (4001, 1), (101, 2), (127, 2), (31, 3)][rng.gen_range(0..6)];
        let f = parse(fs[rng.gen_range(0..fs.len())]);
        let g = parse(gs[rng.gen_range(0..gs.len())]);
        let chi = DirichletCharacter::random(p.pow(m), &mut rng).unwrap();
        let comp = chi.components()[0];
        let k = rng.gen_range(0..=2usize);
        let sys = ShiftSystem::new([3u64, 5][..k].to_vec(), p.pow(m), 10_000_000).unwrap();
        let h: Vec<(u64, u64)> = sys
            .ms
            .iter()
            .map(|&mm| {
                let a = rng.gen_range(1..=mm);
                let mut b = rng.gen_range(1..=mm);
                while b == a {
                    b = rng.gen_range(1..=mm);
                }
                (a, b)
            })
            .collect();
        let sys = sys.with_shifts(h).unwrap();
        let Ok(bound) = diffed_complete_bound(&f, &g, &comp, &sys) else { continue };
        let mult = rng.gen_range(1..p);
        let actual = diffed_local_max(&f, &g, &comp, mult, &sys.offsets());
        assert!(actual <= bound.value + 1e-9, "f={f} g={g} p={p} m={m} k={k}: {actual} > {}", bound.value);
        checked += 1;
        nontrivial += (bound.value < 1.0) as u32;
    }
    assert!(checked >= 40, "only {checked} instances satisfied the hypotheses");
    assert!(nontrivial >= 10);
}

#[test]
fn certified_bound_dominates_and_replays() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let delta = Ratio::new(1, 3);
    for q in [29u64 * 31 * 37, 41 * 43 * 47, 29 * 29 * 31, 53 * 59 * 61] {
        let chi = DirichletCharacter::random_primitive(q, &mut rng).unwrap();
        for g in ["0", "3*x", "x^2"] {
            let n = rng.gen_range(q / 2..=q);
            let inst = SumInstance::new(RationalFunction::x(), parse(g), chi.clone(), rng.gen_range(-100..100), n);
            let rep = certified_incomplete_bound(&inst, delta, 0.1).unwrap();
            let exact = brute_interval_sum(&inst).unwrap().norm() / n as f64;
            assert!(exact <= rep.bound.value + 1e-9, "q={q} g={g}: {exact} > {}", rep.bound.value);
            assert!((recompute_from_trace(&rep.bound) - rep.bound.value).abs() < 1e-12);
        }
    }
}
