mod common;

use common::*;
use ncs_core::certificates::{stable_certificate, unstable_certificate, Mode, PlantCertificate, PlantSpec};
use ncs_core::cycle_search::{design_on_graph, SearchBudget, SearchStats};
use ncs_core::linalg::{expm, Matrix};
use ncs_core::ncs_graph::{NcsGraph, VertexLabel};
use ncs_core::scheduling::{build_schedule, gamma_at, switch_stats, switching_signal, ScheduleLogic, Segment};
use ncs_core::simulator::{chain_check, gas_report, simulate_plant};
use proptest::prelude::*;

fn schedule_strategy() -> impl Strategy<Value = ScheduleLogic> {
    (3usize..6)
        .prop_flat_map(|n| (Just(n), 1..n))
        .prop_flat_map(|(n, m)| {
            (
                Just(n),
                Just(m),
                prop::collection::vec(prop::sample::subsequence((1..=n).collect::<Vec<_>>(), m), 2..6),
                prop::collection::vec(0.05..5.0f64, 6),
            )
        })
        .prop_filter_map("repeated access set", |(n, m, sets, d)| {
            let k = sets.len();
            if (0..k).any(|j| sets[j] == sets[(j + 1) % k]) {
                return None;
            }
            let segments = sets
                .into_iter()
                .zip(d)
                .map(|(ids, duration)| Segment {
                    access: VertexLabel::new(ids).unwrap(),
                    duration,
                })
                .collect();
            ScheduleLogic::new(n, m, segments).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gamma_is_periodic_with_capacity(s in schedule_strategy(), t in 0.0..100.0f64, k in 1u32..5) {
        let a = gamma_at(&s, t);
        prop_assert_eq!(a.len(), s.capacity);
        // shifting by whole periods keeps the same segment (up to boundary rounding)
        let shifted = t + k as f64 * s.period;
        let r = t % s.period;
        let near_boundary = s.offsets().iter().chain(std::iter::once(&s.period))
            .any(|o| (r - o).abs() < 1e-9 * s.period.max(1.0) * (k as f64 + t / s.period));
        if !near_boundary {
            prop_assert_eq!(gamma_at(&s, shifted), a);
        }
    }

    #[test]
    fn signal_matches_access(s in schedule_strategy(), plant_seed in 0usize..100, t in 0.0..50.0f64) {
        let plant = plant_seed % s.n_plants + 1;
        let sig = switching_signal(&s, plant).unwrap();
        let total: f64 = sig.segments.iter().map(|x| x.1).sum();
        prop_assert!((total - s.period).abs() <= 1e-12 * s.period);
        let stable = gamma_at(&s, t).contains(plant);
        prop_assert_eq!(sig.mode_at(t) == Mode::Stable, stable);
        prop_assert!(sig.segments.windows(2).all(|w| w[0].0 != w[1].0));
    }

    #[test]
    fn stats_conserve_time(s in schedule_strategy(), plant_seed in 0usize..100, a in 0.0..40.0f64, len in 0.01..40.0f64) {
        let plant = plant_seed % s.n_plants + 1;
        let sig = switching_signal(&s, plant).unwrap();
        let st = switch_stats(&sig, a, a + len);
        prop_assert!(st.d_stable >= 0.0 && st.d_unstable >= 0.0);
        prop_assert!((st.d_stable + st.d_unstable - len).abs() <= 1e-12 * (a + len));
        prop_assert!(st.n_su.abs_diff(st.n_us) <= 1);
    }

    #[test]
    fn stats_match_fine_sampling(s in schedule_strategy(), plant_seed in 0usize..100, a in 0.0..20.0f64, len in 0.5..20.0f64) {
        let plant = plant_seed % s.n_plants + 1;
        let sig = switching_signal(&s, plant).unwrap();
        let st = switch_stats(&sig, a, a + len);
        // oracle: count mode changes between consecutive fine samples
        let n = 20_000;
        let h = len / n as f64;
        let (mut su, mut us, mut ds) = (0u64, 0u64, 0.0);
        let mut prev = sig.mode_at(a);
        for k in 1..=n {
            let t = a + k as f64 * h;
            let m = sig.mode_at(t);
            if m == Mode::Stable { ds += h; }
            match (prev, m) {
                (Mode::Stable, Mode::Unstable) => su += 1,
                (Mode::Unstable, Mode::Stable) => us += 1,
                _ => {}
            }
            prev = m;
        }
        // sampling can merge two switches closer than h; the exact count is never smaller
        prop_assert!(st.n_su >= su && st.n_us >= us);
        prop_assert!((st.d_stable - ds).abs() <= 2.0 * h * (st.n_su + st.n_us + 1) as f64);
    }
}

fn rk4(a: &Matrix, x0: &[f64], t: f64) -> Vec<f64> {
    let run = |steps: usize| {
        let h = t / steps as f64;
        let mut x = x0.to_vec();
        let add = |x: &[f64], k: &[f64], s: f64| x.iter().zip(k).map(|(a, b)| a + s * b).collect::<Vec<_>>();
        for _ in 0..steps {
            let k1 = a.mul_vec(&x);
            let k2 = a.mul_vec(&add(&x, &k1, h / 2.0));
            let k3 = a.mul_vec(&add(&x, &k2, h / 2.0));
            let k4 = a.mul_vec(&add(&x, &k3, h));
            for i in 0..x.len() {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        x
    };
    // halve the step until two runs agree
    let mut steps = 64;
    let mut prev = run(steps);
    loop {
        steps *= 2;
        let next = run(steps);
        let diff: f64 = prev.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale: f64 = next.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        if diff <= 1e-10 * scale || steps > 1 << 20 {
            return next;
        }
        prev = next;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn single_mode_matches_rk4(a in matrix(3, 1.0), x0 in vector(3, 2.0), t in 0.1..3.0f64) {
        let exact = expm(&a, t).mul_vec(&x0);
        let oracle = rk4(&a, &x0, t);
        let scale = oracle.iter().map(|v| v.abs()).fold(1e-12, f64::max);
        for (e, o) in exact.iter().zip(&oracle) {
            prop_assert!((e - o).abs() <= 1e-6 * scale);
        }
    }
}

/// Two rotating 2-D plants whose certificates give nontrivial jump factors.
fn coupled_plants() -> (Vec<PlantSpec>, Vec<PlantCertificate>) {
    let a = Matrix::from_rows(&[&[0.1, 1.0], &[-1.5, 0.05]]);
    let b = Matrix::from_rows(&[&[0.0], &[1.0]]);
    let k = Matrix::from_rows(&[&[-2.0, -4.0]]);
    let plants: Vec<PlantSpec> = (1..=2)
        .map(|i| PlantSpec::new(i, a.clone(), b.clone(), k.clone()).unwrap())
        .collect();
    let certs = plants
        .iter()
        .map(|p| {
            let s = stable_certificate(&p.closed_loop(), 0.8).unwrap();
            let u = unstable_certificate(&p.a, -0.35).unwrap();
            PlantCertificate::new(p.index, s, u).unwrap()
        })
        .collect();
    (plants, certs)
}

#[test]
fn designed_schedule_passes_all_bounds() {
    let (plants, certs) = coupled_plants();
    assert!(certs[0].mu_su > 1.0 && certs[0].mu_us > 1.0);
    let g = NcsGraph::from_certificates(&certs, 1).unwrap();
    let mut stats = SearchStats::default();
    let design = design_on_graph(&g, &SearchBudget::default(), &mut stats)
        .unwrap()
        .unwrap();
    let schedule = build_schedule(&design);
    for (seed, x0) in [[1.0, 0.0], [0.0, 1.0], [-3.0, 2.5], [0.7, -0.2]].iter().enumerate() {
        for (p, c) in plants.iter().zip(&certs) {
            let horizon = 10.0 * schedule.period;
            let tr = simulate_plant(p, c, &schedule, x0, horizon, schedule.period / 37.0).unwrap();
            let rep = gas_report(&tr, c, &schedule).unwrap();
            assert!(rep.passed, "seed {seed} plant {}: {rep:?}", p.index);
            let xi = design.xi_margins[p.index - 1];
            assert!((rep.xi - xi).abs() <= 1e-9 * xi.abs().max(1.0));
            let chain = chain_check(&tr, c, &schedule).unwrap();
            assert!(chain.passed, "{chain:?}");
            assert!(chain.instants >= 10);
            // mode-wise bounds inside every segment
            for w in tr.samples.windows(2) {
                if w[0].mode != w[1].mode || w[1].at_switch || w[0].v_value == 0.0 {
                    continue;
                }
                let h = w[1].t - w[0].t;
                let cert = c.mode(w[0].mode);
                let grow = (-cert.lambda * h).exp();
                assert!(w[1].v_value <= grow * w[0].v_value * (1.0 + 1e-8));
            }
        }
    }
}
