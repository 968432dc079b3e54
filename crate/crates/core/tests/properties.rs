mod common;

use common::*;
use fdp::curve::{from_distribution_pair, Discretization, DominanceOrder, SymmetrizeMode, TradeoffCurve};
use fdp::dist::DiscreteDistribution;
use fdp::duality::{delta_at_eps, eps_at_delta, hockey_stick};
use fdp::mech::{discrete_gaussian_curve, mixture_bound, subsampled_curve};
use fdp::oracle::exact_tradeoff_discrete;
use fdp::pld::{curve_to_pld, pld_to_curve, PrivacyLossDistribution, Rounding};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructors_are_valid(
        mu in 0.0f64..4.0,
        eps in 0.0f64..3.0,
        delta in 0.0f64..0.5,
        (p, q) in pair(12),
        rate in 0.0f64..=1.0,
        sigma in 0.5f64..4.0,
    ) {
        let pair_curve = from_distribution_pair(&p, &q).unwrap();
        let curves = [
            TradeoffCurve::gaussian(mu).unwrap(),
            TradeoffCurve::eps_delta(eps, delta).unwrap(),
            pair_curve.clone(),
            subsampled_curve(&TradeoffCurve::gaussian(mu).unwrap(), rate).unwrap(),
            pair_curve.symmetrize(SymmetrizeMode::Max),
            pair_curve.symmetrize(SymmetrizeMode::MinBiconjugate),
            discrete_gaussian_curve(sigma, 1).unwrap(),
        ];
        for f in &curves {
            prop_assert!(validity_violation(f, GRID) <= 1e-12, "{:?}", f.kind());
        }
    }

    #[test]
    fn inversion_is_an_involution((p, q) in pair(16)) {
        let f = from_distribution_pair(&p, &q).unwrap();
        prop_assert!(f.invert().invert().sup_distance(&f, GRID) <= 1e-10);
    }

    #[test]
    fn biconjugate_recovers_the_curve((p, q) in pair(16)) {
        let f = from_distribution_pair(&p, &q).unwrap();
        let conj = f.conjugate();
        for i in 0..=500 {
            let a = i as f64 / 500.0;
            prop_assert!((conj.conjugate_at(a) - f.value(a)).abs() <= 1e-10);
        }
    }

    #[test]
    fn post_processing_never_helps((p, q) in pair(5).prop_filter("five outcomes", |(p, _)| p.len() == 5), k in kernel(5, 5)) {
        let before = from_distribution_pair(&p, &q).unwrap();
        let after = from_distribution_pair(&p.push_forward(&k).unwrap(), &q.push_forward(&k).unwrap()).unwrap();
        prop_assert!(before.max_excess(&after, GRID) <= 1e-12 || after.max_excess(&before, GRID) >= -1e-12);
        prop_assert!(after.max_excess(&before, GRID) <= 1e-12);
    }

    #[test]
    fn discretization_sandwich((p, q) in pair(10), coarse in prop::bool::ANY) {
        let f = from_distribution_pair(&p, &q).unwrap();
        let cell = if coarse { 1e-2 } else { 1e-3 };
        let lower = pld_to_curve(&curve_to_pld(&f, cell, Rounding::Pessimistic).unwrap());
        let upper = pld_to_curve(&curve_to_pld(&f, cell, Rounding::Optimistic).unwrap());
        prop_assert!(f.max_excess(&lower, GRID) <= 1e-12);
        prop_assert!(upper.max_excess(&f, GRID) <= 1e-12);
    }

    #[test]
    fn subsampling_only_adds_privacy(mu in 0.0f64..5.0, rate in 0.0f64..=1.0) {
        let base = TradeoffCurve::gaussian(mu).unwrap();
        let sub = subsampled_curve(&base, rate).unwrap();
        // the smooth base is first replaced by its tangent lower bound, so
        // the comparison is against that bound
        let floor = base.to_piecewise(Discretization::Tangent);
        prop_assert!(sub.max_excess(&floor, GRID) <= 1e-12);
        prop_assert!(sub.max_excess(&base, GRID) <= floor.max_excess(&base, GRID) + 1e-12);
    }

    #[test]
    fn mixture_bound_is_conservative(
        comps in prop::collection::vec((weights(4), weights(4)), 1..4),
        mix in prop::collection::vec(0.05f64..1.0, 3),
    ) {
        let k = comps.len();
        let total: f64 = mix[..k].iter().sum();
        let w: Vec<f64> = mix[..k].iter().map(|x| x / total).collect();
        let pairs: Vec<(DiscreteDistribution, DiscreteDistribution)> =
            comps.iter().map(|(a, b)| (normalize(a), normalize(b))).collect();
        let bound = mixture_bound(&pairs, &w).unwrap();
        prop_assert!(validity_violation(&bound, 2001) <= 1e-12);
        let blend = |side: fn(&(DiscreteDistribution, DiscreteDistribution)) -> &DiscreteDistribution| {
            let mut m = vec![0.0; 4];
            for (pq, wi) in pairs.iter().zip(&w) {
                for (o, x) in m.iter_mut().zip(side(pq).mass()) {
                    *o += wi * x;
                }
            }
            normalize(&m)
        };
        let exact = from_distribution_pair(&blend(|pq| &pq.0), &blend(|pq| &pq.1)).unwrap();
        prop_assert!(exact.max_excess(&bound, GRID) <= 1e-12);
    }

    #[test]
    fn hockey_stick_matches_duality((p, q) in pair(12), eps in 0.0f64..3.0) {
        let f = from_distribution_pair(&p, &q).unwrap();
        let direct = hockey_stick(&p, &q, eps).unwrap().max(hockey_stick(&q, &p, eps).unwrap());
        prop_assert!((direct - delta_at_eps(&f, eps)).abs() <= 1e-12);
    }

    #[test]
    fn duality_is_monotone(mu in 0.1f64..4.0) {
        let g = TradeoffCurve::gaussian(mu).unwrap();
        let deltas: Vec<f64> = (0..40).map(|i| delta_at_eps(&g, i as f64 * 0.25)).collect();
        prop_assert!(deltas.windows(2).all(|w| w[1] <= w[0]));
        let eps: Vec<f64> = (1..12).map(|i| eps_at_delta(&g, 10f64.powi(-i)).unwrap()).collect();
        prop_assert!(eps.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn dominance_transfers_to_delta(a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let (f, g) = (TradeoffCurve::gaussian(a).unwrap(), TradeoffCurve::gaussian(b).unwrap());
        if f.compare(&g, 2001).unwrap() == DominanceOrder::Dominates {
            for i in 0..30 {
                let eps = i as f64 * 0.2;
                prop_assert!(delta_at_eps(&f, eps) <= delta_at_eps(&g, eps));
            }
        }
    }
}

#[test]
fn pure_dp_links_are_exact() {
    for eps in [0.0, 0.1, 0.5, 1.0, 2.5] {
        let f = TradeoffCurve::eps_delta(eps, 0.0).unwrap();
        assert_eq!(f.max_divergence(), eps);
        let renyi: Vec<f64> = [1.5, 2.0, 5.0, 20.0, 100.0, 1000.0].iter().map(|&g| f.renyi(g).unwrap()).collect();
        assert!(renyi.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!(renyi.iter().all(|&r| r <= eps + 1e-12));
        assert!(eps - renyi.last().unwrap() < 0.01 * eps.max(1e-3));
    }
}

#[test]
fn equivalence_theorem_on_a_grid() {
    for eps in [0.0, 0.1, 0.5, 1.0, 2.0, 4.0] {
        for delta in [0.0, 1e-9, 1e-5, 1e-2, 0.1, 0.3] {
            let f = TradeoffCurve::eps_delta(eps, delta).unwrap();
            assert_eq!(delta_at_eps(&f, eps), delta, "({eps}, {delta})");
        }
    }
}

#[test]
fn halving_the_cell_halves_the_gap() {
    let g = TradeoffCurve::gaussian(1.0).unwrap();
    let gap = |cell: f64| {
        let lo = pld_to_curve(&curve_to_pld(&g, cell, Rounding::Pessimistic).unwrap());
        let hi = pld_to_curve(&curve_to_pld(&g, cell, Rounding::Optimistic).unwrap());
        hi.sup_distance(&lo, GRID)
    };
    let mut previous = gap(0.04);
    for cell in [0.02, 0.01, 0.005] {
        let next = gap(cell);
        assert!(next <= 0.5 * previous * (1.0 + 1e-3), "{cell}: {next} vs {previous}");
        previous = next;
    }
}

#[test]
fn mass_survives_ten_thousand_compositions() {
    let g = TradeoffCurve::gaussian(0.01).unwrap();
    for rounding in [Rounding::Pessimistic, Rounding::Optimistic] {
        let pld: PrivacyLossDistribution = curve_to_pld(&g, 1e-4, rounding).unwrap();
        let composed = pld.self_convolve(10_000).unwrap();
        let total = composed.total_p() + composed.p_infinity();
        assert!((total - 1.0).abs() <= 1e-9, "{rounding:?}: {total}");
    }
}

#[test]
fn discrete_gaussian_against_continuous() {
    // frozen relation: at the same scale neither curve dominates; each lies
    // above the other somewhere, by margins that shrink like sigma^-3
    let frozen = [
        (0.5, 0.227, 0.118),
        (1.0, 0.0344, 0.0161),
        (2.0, 4.20e-3, 2.03e-3),
        (3.0, 1.24e-3, 6.13e-4),
        (5.0, 2.66e-4, 1.31e-4),
        (10.0, 3.33e-5, 1.64e-5),
    ];
    let mut previous = f64::INFINITY;
    for (sigma, above, below) in frozen {
        let d = discrete_gaussian_curve(sigma, 1).unwrap();
        let g = TradeoffCurve::gaussian(1.0 / sigma).unwrap();
        assert_eq!(d.compare(&g, 2001).unwrap(), DominanceOrder::Incomparable, "sigma {sigma}");
        let (up, down) = (g.max_excess(&d, GRID), d.max_excess(&g, GRID));
        assert!((up - above).abs() <= 0.02 * above, "sigma {sigma}: {up}");
        assert!((down - below).abs() <= 0.02 * below, "sigma {sigma}: {down}");
        let dist = d.sup_distance(&TradeoffCurve::identity(), 2001);
        assert!(dist < previous);
        previous = dist;
    }
}

#[test]
fn exact_oracle_agrees_with_the_library() {
    let mut rng = rng(2024);
    for trial in 0..200 {
        let n = 2 + trial % 19;
        let (p, q) = (seeded_law(&mut rng, n), seeded_law(&mut rng, n));
        let a = exact_tradeoff_discrete(&p, &q).unwrap();
        let b = from_distribution_pair(&p, &q).unwrap();
        assert!(a.sup_distance(&b, 2001) <= 1e-15, "trial {trial}");
    }
}
