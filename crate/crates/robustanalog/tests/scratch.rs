use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use robustanalog::env::{
    compute_reward, evaluate_ota2, ota2_benchmark_with, Ota2Constants, Surrogate,
};

fn envf(name: &str, default: f64) -> f64 {
    std::env::var(name)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

#[test]
#[ignore]
fn probe() {
    let d = Ota2Constants::builtin();
    let c = Ota2Constants {
        schema: 1,
        g0: envf("G0", d.g0),
        i0: envf("I0", d.i0),
        k6: envf("K6", d.k6),
        cl: envf("CL", d.cl),
        cpar: envf("CPAR", d.cpar),
    };
    let b = ota2_benchmark_with(c).unwrap();
    let constants = match &b.surrogate {
        Surrogate::Ota2(c) => *c,
        _ => unreachable!(),
    };
    let n = 100_000usize;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut nominal_pass = 0usize;
    let mut all_pass = 0usize;
    let mut per_constraint_fail = [0usize; 3];
    let mut first_passes: Vec<Vec<f64>> = Vec::new();
    for _ in 0..n {
        let s = b.space.random_sizing(&mut rng);
        let mn = evaluate_ota2(&s, b.nominal_corner(), &constants);
        let rn = compute_reward(&mn, &b.constraints).unwrap();
        if rn.passed {
            nominal_pass += 1;
        }
        let mut ok = true;
        for corner in &b.corners {
            let m = evaluate_ota2(&s, corner, &constants);
            let r = compute_reward(&m, &b.constraints).unwrap();
            if !r.passed {
                for (i, d) in r.deficits.iter().enumerate() {
                    if *d < 0.0 {
                        per_constraint_fail[i] += 1;
                    }
                }
                ok = false;
                break;
            }
        }
        if ok {
            all_pass += 1;
            if first_passes.len() < 3 {
                first_passes.push(s.0.clone());
            }
        }
    }
    println!(
        "g0={} i0={} k6={} cl={} cpar={}",
        constants.g0, constants.i0, constants.k6, constants.cl, constants.cpar
    );
    println!(
        "nominal pass rate: {:.4}  ({nominal_pass}/{n})",
        nominal_pass as f64 / n as f64
    );
    println!(
        "all-corner pass rate: {:.6}  ({all_pass}/{n})",
        all_pass as f64 / n as f64
    );
    println!(
        "first-failed-constraint counts (i, ugb, phm): {:?}",
        per_constraint_fail
    );
    for p in &first_passes {
        println!("pass example: {p:?}");
    }
}

#[test]
#[ignore]
fn probe_synthetic() {
    use robustanalog::env::{generate_synthetic_benchmark, CornerSpec};
    let combos = [
        (3usize, 2usize, 10usize, 0.1f64),
        (3, 2, 10, 0.3),
        (4, 3, 20, 0.1),
        (4, 3, 20, 0.3),
        (4, 3, 20, 0.6),
        (2, 2, 6, 0.1),
        (2, 2, 6, 0.3),
    ];
    for (params, metrics, corners, difficulty) in combos {
        for model_seed in [7u64, 8, 9] {
            let spec = CornerSpec::MonteCarlo {
                count: corners,
                voltage_range: (1.0, 1.2),
                temperature_range: (0.0, 100.0),
            };
            let b = generate_synthetic_benchmark(model_seed, params, metrics, &spec, difficulty)
                .unwrap();
            let n = b.corner_count();
            let mut rng = ChaCha8Rng::seed_from_u64(500);
            let trials = 20_000;
            let mut nominal_pass = 0u32;
            let mut all_pass = 0u32;
            for _ in 0..trials {
                let s = b.space.random_sizing(&mut rng);
                let mut all = true;
                for c in 0..n {
                    let m = b.evaluate(&s, c).unwrap();
                    let r = compute_reward(&m, &b.constraints).unwrap();
                    if c == b.nominal_index && r.passed {
                        nominal_pass += 1;
                    }
                    if !r.passed {
                        all = false;
                        if c > b.nominal_index {
                            break;
                        }
                    }
                }
                if all {
                    all_pass += 1;
                }
            }
            println!(
                "p={params} m={metrics} c={n} d={difficulty} seed={model_seed}: nominal {:.4} all {:.5}",
                nominal_pass as f64 / trials as f64,
                all_pass as f64 / trials as f64
            );
        }
    }
}
