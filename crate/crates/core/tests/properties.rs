use proptest::prelude::*;

use rsma_mec::analytics::{ps_case1_closed, ps_case2_closed, ps_total_closed};
use rsma_mec::noma::{noma_rates, SicOrder};
use rsma_mec::rsma::{
    decide, interference_threshold, offload_outcome, pu_alone_ok, sic_sinrs, Case, RateTargets, Slot,
};
use rsma_mec::system_model::{path_loss, transmit_snr, ChannelDraw};

fn slot() -> Slot {
    Slot::new(5e-3, 1e6)
}

prop_compose! {
    fn scenario()(
        rho_a in 1e-1f64..1e5,
        rho_b in 1e-1f64..1e5,
        g_a in 1e-4f64..8.0,
        g_b in 1e-4f64..8.0,
        target_a in 100f64..20e3,
        target_b in 100f64..20e3,
    ) -> (ChannelDraw, RateTargets) {
        let s = slot();
        (ChannelDraw::new(g_a, g_b, rho_a, rho_b), RateTargets::new(target_a, target_b, s.t2, s.bandwidth).unwrap())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn pu_never_worse_off((draw, t) in scenario()) {
        let d = decide(&draw, &t, slot());
        if d.tau > 0.0 {
            prop_assert_eq!(offload_outcome(&d, &t).0, pu_alone_ok(draw.rho_a_ga(), &t));
        }
    }

    #[test]
    fn split_parameters_in_unit_interval((draw, t) in scenario()) {
        let d = decide(&draw, &t, slot());
        prop_assert!((0.0..=1.0).contains(&d.alpha));
        prop_assert!((0.0..=1.0).contains(&d.beta));
        prop_assert!(d.rate_b1 >= 0.0 && d.rate_b2 >= 0.0);
    }

    #[test]
    fn case_two_interference_is_exactly_tau((draw, t) in scenario()) {
        let d = decide(&draw, &t, slot());
        if d.case == Case::II && !d.su_silent {
            prop_assert!((d.sinr_b2 - d.tau).abs() <= 1e-12 * d.tau.max(1.0));
            let (_, gamma_a, residual) = sic_sinrs(d.alpha, draw.rho_a_ga(), draw.rho_b_gb());
            prop_assert!((residual - d.tau).abs() <= 1e-9 * d.tau.max(1.0));
            prop_assert!((gamma_a - t.eps_a).abs() <= 1e-9 * t.eps_a.max(1.0));
        }
    }

    #[test]
    fn other_splits_do_not_beat_alpha_star((draw, t) in scenario(), nudge in -0.2f64..0.2) {
        let d = decide(&draw, &t, slot());
        if d.case == Case::II && !d.su_silent {
            let s = slot();
            // any alpha that still protects the PU gives no more SU rate
            let alpha = (d.alpha + nudge).clamp(0.0, 1.0);
            let (g1, ga, g2) = sic_sinrs(alpha, draw.rho_a_ga(), draw.rho_b_gb());
            if ga >= t.eps_a * (1.0 - 1e-12) {
                let su = s.bits(g1) + s.bits(g2);
                prop_assert!(su <= d.rate_b * (1.0 + 1e-9) + 1e-9);
            }
        }
    }

    #[test]
    fn rsma_succeeds_whenever_a_noma_order_does((draw, t) in scenario()) {
        let d = decide(&draw, &t, slot());
        let (pu, su) = offload_outcome(&d, &t);
        for order in [SicOrder::PuFirst, SicOrder::SuFirst] {
            let r = noma_rates(order, draw.rho_a_ga(), draw.rho_b_gb(), slot());
            if r.sinr_a >= t.eps_a && r.sinr_b >= t.eps_b {
                prop_assert!(pu && su, "{order} succeeds but RSMA does not: {d:?}");
            }
        }
    }

    #[test]
    fn boundary_continuity(rho_a_ga in 1.0f64..1e4, eps_a in 0.1f64..50.0) {
        // just above tau, Case II takes over from Case I with alpha ~ 0
        let tau = interference_threshold(rho_a_ga, eps_a).unwrap();
        prop_assume!(tau > 1e-3);
        let s = slot();
        let t = RateTargets { eps_a, ..RateTargets::new(1e3, 1e3, s.t2, s.bandwidth).unwrap() };
        let below = decide(&ChannelDraw::new(rho_a_ga, tau * (1.0 - 1e-9), 1.0, 1.0), &t, s);
        let above = decide(&ChannelDraw::new(rho_a_ga, tau * (1.0 + 1e-9), 1.0, 1.0), &t, s);
        prop_assert_eq!(below.case, Case::I);
        prop_assert_eq!(above.case, Case::II);
        prop_assert!(above.alpha < 1e-8);
        if !above.su_silent {
            prop_assert!((below.rate_b - above.rate_b).abs() <= 1e-6 * below.rate_b.max(1.0));
        }
    }

    #[test]
    fn ps_is_a_probability(
        rho_a in 1e-2f64..1e6, rho_b in 1e-2f64..1e6, eps_a in 0.0f64..100.0, eps_b in 0.0f64..100.0,
    ) {
        let c1 = ps_case1_closed(rho_a, rho_b, eps_a, eps_b).unwrap();
        let c2 = ps_case2_closed(rho_a, rho_b, eps_a, eps_b).unwrap();
        let t = ps_total_closed(rho_a, rho_b, eps_a, eps_b).unwrap();
        for v in [c1, c2, t] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!((c1 + c2 - t).abs() <= 1e-9);
    }

    #[test]
    fn ps_monotone(rho_a in 1e-1f64..1e4, rho_b in 1e-1f64..1e4, eps_a in 0.01f64..20.0, eps_b in 0.01f64..20.0) {
        let p = |ra, rb, ea, eb| ps_total_closed(ra, rb, ea, eb).unwrap();
        let base = p(rho_a, rho_b, eps_a, eps_b);
        let slack = 1e-9;
        prop_assert!(p(rho_a * 1.5, rho_b, eps_a, eps_b) >= base - slack);
        prop_assert!(p(rho_a, rho_b * 1.5, eps_a, eps_b) >= base - slack);
        prop_assert!(p(rho_a, rho_b, eps_a * 1.5, eps_b) <= base + slack);
        prop_assert!(p(rho_a, rho_b, eps_a, eps_b * 1.5) <= base + slack);
    }

    #[test]
    fn ps_continuous_across_equal_snr(rho in 1e-1f64..1e4, eps_a in 0.01f64..20.0, eps_b in 0.01f64..20.0) {
        let at = ps_total_closed(rho, rho, eps_a, eps_b).unwrap();
        for rel in [1e-12, 1e-10, 1e-8, 1e-6] {
            let up = ps_total_closed(rho * (1.0 + rel), rho, eps_a, eps_b).unwrap();
            let dn = ps_total_closed(rho * (1.0 - rel), rho, eps_a, eps_b).unwrap();
            prop_assert!((up - at).abs() <= 1e-6 && (dn - at).abs() <= 1e-6, "{rel}: {dn} {at} {up}");
        }
    }

    #[test]
    fn snr_linear_in_power(p in 1e-6f64..1e3, k in 0.1f64..10.0, d in 1.0f64..100.0) {
        let l = path_loss(d, 4.0).unwrap();
        let one = transmit_snr(p, l, 1e-9).unwrap();
        let scaled = transmit_snr(k * p, l, 1e-9).unwrap();
        prop_assert!((scaled - k * one).abs() <= 1e-12 * scaled);
    }

    #[test]
    fn path_loss_decreases_with_distance(d in 0.0f64..1e3, step in 1e-3f64..10.0, ups in 2.0f64..6.0) {
        let near = path_loss(d, ups).unwrap();
        let far = path_loss(d + step, ups).unwrap();
        prop_assert!(far < near && near <= 1.0);
    }
}
