use proptest::prelude::*;

use super::*;

/// Independent oracle: solve `g * ln(1 + overshoot/g) = excess` for g by
/// bisection. Used to pin the reception-curve constant from the single
/// calibration point (15000 sent -> 14544 received, linear limit 10000).
fn bisect_gamma(overshoot: f64, excess: f64) -> f64 {
    let f = |g: f64| g * (overshoot / g).ln_1p() - excess;
    let (mut lo, mut hi) = (1.0, 1e7);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn gamma_constant_matches_bisection_oracle() {
    let gamma = bisect_gamma(5000.0, 4544.0);
    assert!(
        (gamma - profiles::RPI_RECEPTION_GAMMA).abs() < 1e-6,
        "frozen gamma {} vs oracle {}",
        profiles::RPI_RECEPTION_GAMMA,
        gamma
    );
}

#[test]
fn reception_reproduces_calibration_point() {
    let rpi = raspberry_pi_profile();
    let received = reception_rate(15_000.0, &rpi);
    assert!((received - 14_544.0).abs() <= 1.0, "received {received}");
}

#[test]
fn reception_linear_region_is_identity() {
    let rpi = raspberry_pi_profile();
    assert_eq!(reception_rate(0.0, &rpi), 0.0);
    assert_eq!(reception_rate(5000.0, &rpi), 5000.0);
    let ard = arduino_profile();
    assert_eq!(reception_rate(200.0, &ard), 200.0);
}

#[test]
fn reception_is_continuous_at_linear_limit() {
    let rpi = raspberry_pi_profile();
    let below = reception_rate(10_000.0, &rpi);
    let above = reception_rate(10_000.0 + 1e-6, &rpi);
    assert!((above - below).abs() < 1e-5);
}

proptest! {
    #[test]
    fn reception_never_exceeds_sent(sent in 0.0f64..200_000.0) {
        let rpi = raspberry_pi_profile();
        let ard = arduino_profile();
        prop_assert!(reception_rate(sent, &rpi) <= sent);
        prop_assert!(reception_rate(sent, &ard) <= sent);
    }

    #[test]
    fn reception_is_monotone(a in 0.0f64..200_000.0, b in 0.0f64..200_000.0) {
        let rpi = raspberry_pi_profile();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(reception_rate(lo, &rpi) <= reception_rate(hi, &rpi));
    }

    #[test]
    fn attack_energy_is_monotone_and_bounded(
        a in 0.0f64..200_000.0,
        b in 0.0f64..200_000.0,
    ) {
        let rpi = raspberry_pi_profile();
        let base = rpi.e_base_mid();
        let ceiling = rpi.attack_ceiling(Protocol::Icmp, PortState::Open);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let e_lo = attack_energy_rate(lo, Protocol::Icmp, PortState::Open, &rpi);
        let e_hi = attack_energy_rate(hi, Protocol::Icmp, PortState::Open, &rpi);
        prop_assert!(e_lo <= e_hi);
        prop_assert!(e_lo >= base && e_hi < ceiling);
    }
}

#[test]
fn port_tables_match_calibrated_scan_counts() {
    let rpi = raspberry_pi_profile();
    let tcp = rpi.port_table.count_all(Protocol::TcpSyn);
    assert_eq!(
        (tcp.open, tcp.open_filtered, tcp.filtered, tcp.closed),
        (3, 998, 65_389, 0)
    );
    let udp = rpi.port_table.count_all(Protocol::Udp);
    assert_eq!((udp.open, udp.open_filtered, udp.closed), (4, 700, 0));
    assert_eq!(udp.filtered, 0);

    let ard = arduino_profile();
    let tcp = ard.port_table.count_all(Protocol::TcpSyn);
    assert_eq!(
        (tcp.open, tcp.filtered, tcp.open_filtered, tcp.closed),
        (1, 22, 1000, 0)
    );
    let udp = ard.port_table.count_all(Protocol::Udp);
    assert_eq!(udp.open_filtered, 1000);
    assert_eq!(udp.total(), 1000);
}

#[test]
fn port_counts_reconcile_with_per_port_map() {
    for profile in [raspberry_pi_profile(), arduino_profile()] {
        for protocol in [Protocol::TcpSyn, Protocol::Udp] {
            let counts = profile.port_table.count_all(protocol);
            assert_eq!(counts.total(), profile.port_table.port_space(protocol));
        }
    }
}

#[test]
fn lowest_port_selector_is_deterministic() {
    let rpi = raspberry_pi_profile();
    assert_eq!(rpi.port_table.lowest_in_state(Protocol::TcpSyn, PortState::Open), Some(22));
    assert_eq!(
        rpi.port_table.lowest_in_state(Protocol::TcpSyn, PortState::OpenFiltered),
        Some(1001)
    );
    assert_eq!(rpi.port_table.lowest_in_state(Protocol::TcpSyn, PortState::Filtered), Some(1));
    assert_eq!(rpi.port_table.lowest_in_state(Protocol::TcpSyn, PortState::Closed), None);
}

#[test]
fn disconnect_survives_below_received_threshold() {
    let ard = arduino_profile();
    let thr = ard.threshold_received(PayloadClass::Np).unwrap();
    let outcome = disconnect_outcome(thr - 1.0, Protocol::Udp, PayloadClass::Np, 30.0, &ard);
    assert_eq!(outcome, DisconnectOutcome::Survives);
}

#[test]
fn disconnect_at_threshold_returns_reference_sd() {
    let rpi = raspberry_pi_profile();
    let thr = rpi.threshold_received(PayloadClass::Np).unwrap();
    match disconnect_outcome(thr, Protocol::Icmp, PayloadClass::Np, 30.0, &rpi) {
        DisconnectOutcome::DisconnectsAt(sd) => assert!((sd - 7.58).abs() < 1e-9),
        other => panic!("expected disconnect, got {other:?}"),
    }

    let ard = arduino_profile();
    let thr = ard.threshold_received(PayloadClass::Hp).unwrap();
    match disconnect_outcome(thr, Protocol::Udp, PayloadClass::Hp, 30.0, &ard) {
        DisconnectOutcome::DisconnectsAt(sd) => assert!((sd - 2.44).abs() < 1e-9),
        other => panic!("expected disconnect, got {other:?}"),
    }
}

#[test]
fn hp_flood_never_disconnects_raspberry_pi() {
    let rpi = raspberry_pi_profile();
    for protocol in [Protocol::Icmp, Protocol::TcpSyn, Protocol::Udp] {
        let outcome = disconnect_outcome(1e9, protocol, PayloadClass::Hp, 30.0, &rpi);
        assert_eq!(outcome, DisconnectOutcome::Survives);
    }
}

#[test]
fn sd_scales_inversely_with_received_rate() {
    let ard = arduino_profile();
    let thr = ard.threshold_received(PayloadClass::Np).unwrap();
    for k in [1.0, 1.5, 2.0, 4.0] {
        match disconnect_outcome(k * thr, Protocol::TcpSyn, PayloadClass::Np, 30.0, &ard) {
            DisconnectOutcome::DisconnectsAt(sd) => {
                assert!((sd - 3.3 / k).abs() < 1e-9, "k={k} sd={sd}");
            }
            other => panic!("expected disconnect at k={k}, got {other:?}"),
        }
    }
}

#[test]
fn sd_is_clamped_to_max_duration() {
    // Custom profile whose reference SD exceeds the attack window.
    let mut profile = arduino_profile();
    profile.sd_ref.insert((Protocol::Udp, PayloadClass::Np), 50.0);
    let thr = profile.threshold_received(PayloadClass::Np).unwrap();
    match disconnect_outcome(thr, Protocol::Udp, PayloadClass::Np, 30.0, &profile) {
        DisconnectOutcome::DisconnectsAt(sd) => assert_eq!(sd, 30.0),
        other => panic!("expected clamped disconnect, got {other:?}"),
    }
}

/// Independent oracle for the energy calibration: evaluate the closed form
/// at the near-threshold operating point and check it clears 95% of every
/// per-protocol ceiling while staying under it.
#[test]
fn energy_reaches_95_percent_of_ceiling_at_near_threshold() {
    for profile in [raspberry_pi_profile(), arduino_profile()] {
        let near = profile.near_threshold_rate(PayloadClass::Np);
        let received = reception_rate(near as f64, &profile);
        for (&protocol, &ceiling) in &profile.e_max {
            let energy = attack_energy_rate(received, protocol, PortState::Open, &profile);
            assert!(
                energy >= 0.95 * ceiling,
                "{} {protocol:?}: {energy} < 0.95 * {ceiling}",
                profile.device_class
            );
            assert!(energy < ceiling);
        }
    }
}

#[test]
fn energy_at_zero_received_is_baseline_mid() {
    let rpi = raspberry_pi_profile();
    let energy = attack_energy_rate(0.0, Protocol::Icmp, PortState::Open, &rpi);
    assert_eq!(energy, rpi.e_base_mid());
}

#[test]
fn closed_port_attack_uses_attenuated_ceiling() {
    let rpi = raspberry_pi_profile();
    let base = rpi.e_base_mid();
    let open = rpi.attack_ceiling(Protocol::TcpSyn, PortState::Open);
    let closed = rpi.attack_ceiling(Protocol::TcpSyn, PortState::Closed);
    assert!((closed - (base + 0.5 * (open - base))).abs() < 1e-12);
    assert_eq!(rpi.attack_ceiling(Protocol::TcpSyn, PortState::Filtered), closed);
    assert_eq!(rpi.attack_ceiling(Protocol::TcpSyn, PortState::OpenFiltered), open);
}

#[test]
fn udp_jitter_stays_within_ceiling_at_extremes() {
    for profile in [raspberry_pi_profile(), arduino_profile()] {
        let near = profile.near_threshold_rate(PayloadClass::Np);
        let received = reception_rate(near as f64, &profile);
        let energy = attack_energy_rate(received, Protocol::Udp, PortState::Open, &profile);
        let ceiling = profile.e_max[&Protocol::Udp];
        for jitter in [-1.0, 0.0, 1.0] {
            let sample = apply_udp_jitter(energy, jitter, &profile);
            assert!(sample <= ceiling, "{}: {sample} > {ceiling}", profile.device_class);
            assert!(sample >= profile.e_base_mid());
        }
    }
}

#[test]
fn fap_energy_exceeds_reported_level_at_injection_rate() {
    let rpi = raspberry_pi_profile();
    let received = reception_rate(rpi.near_threshold_rate(PayloadClass::Np) as f64, &rpi);
    assert!(fap_energy_rate(received, &rpi) > 4.00);

    let ard = arduino_profile();
    let received = reception_rate(ard.near_threshold_rate(PayloadClass::Np) as f64, &ard);
    assert!(fap_energy_rate(received, &ard) > 2.00);
}

#[test]
fn baseline_energy_spans_the_band() {
    let rpi = raspberry_pi_profile();
    assert_eq!(baseline_energy(0.0, &rpi), 1.410);
    assert!((baseline_energy(1.0, &rpi) - 1.420).abs() < 1e-12);
    let mid = baseline_energy(0.5, &rpi);
    assert!(mid > 1.410 && mid < 1.420);
}

#[test]
fn energy_sample_identities_hold() {
    let rpi = raspberry_pi_profile();
    let sample = EnergySample::from_joules(10, 1.415, &rpi);
    assert!((sample.joules - sample.watts).abs() < 1e-9);
    assert!((sample.current - sample.watts / sample.voltage).abs() < 1e-9);
    assert_eq!(sample.voltage, 5.1);
}

#[test]
fn profile_invariants_hold_for_builtins() {
    for profile in [raspberry_pi_profile(), arduino_profile()] {
        assert!(profile.e_base.0 <= profile.e_base.1);
        for ceiling in profile.e_max.values() {
            assert!(*ceiling >= profile.e_base.1);
        }
        if let (Some(hp), Some(np)) = (
            profile.threshold_rate(PayloadClass::Hp),
            profile.threshold_rate(PayloadClass::Np),
        ) {
            assert!(hp <= np);
        }
        for sd in profile.sd_ref.values() {
            assert!(*sd > 0.0);
        }
        assert!(profile.fap_connect_range.0 <= profile.fap_connect_range.1);
    }
}

#[test]
fn rate_cap_is_enforced() {
    assert!(check_rate(RATE_CAP).is_ok());
    assert!(matches!(
        check_rate(RATE_CAP + 1),
        Err(SimError::RateAboveCap { .. })
    ));
}
