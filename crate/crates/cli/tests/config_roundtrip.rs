use std::path::PathBuf;

use infospread::sim::{DistanceMetric, Mobility, UplinkMode};
use infospread::{Config, Mode};
use infospread_cli::ExperimentConfig;
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        0.0f64..10.0
    ]
}

fn network() -> impl Strategy<Value = Config> {
    (
        any::<[u32; 4]>(),
        [finite(), finite(), finite(), finite(), finite()],
    )
        .prop_map(|(n, x)| Config {
            n_bs: n[0],
            n_mu: n[1],
            n_src: n[2],
            slot_cap: n[3],
            area: x[0],
            beta: x[1],
            alpha: x[2],
            power_cap: x[3],
            target_ratio: x[4],
        })
}

fn experiment() -> impl Strategy<Value = ExperimentConfig> {
    (
        network(),
        [finite(), finite(), finite()],
        (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()),
        (any::<usize>(), any::<u64>(), any::<u64>()),
        proptest::option::of("[A-Za-z0-9_./-][A-Za-z0-9_./ -]{0,30}[A-Za-z0-9_./-]"),
    )
        .prop_map(
            |(network, [mu, speed, slot_period], flags, (k_max, trials, seed), output)| {
                ExperimentConfig {
                    network,
                    mu,
                    mode: if flags.0 {
                        Mode::Unicast
                    } else {
                        Mode::Broadcast
                    },
                    mobility: if flags.1 {
                        Mobility::Iid
                    } else {
                        Mobility::RandomDirection
                    },
                    speed,
                    slot_period,
                    k_max,
                    trials,
                    seed,
                    distance: if flags.2 {
                        DistanceMetric::Torus
                    } else {
                        DistanceMetric::Bounded
                    },
                    uplink: if flags.3 {
                        UplinkMode::AnalysisMatched
                    } else {
                        UplinkMode::Structural
                    },
                    output: output.map(PathBuf::from),
                }
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn serialize_then_parse_is_identity(cfg in experiment()) {
        let text = cfg.to_config_string();
        let parsed = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(parsed.to_config_string(), text);
    }
}

#[test]
fn fig2_preset_round_trips() {
    let cfg = ExperimentConfig::fig2();
    assert_eq!(
        ExperimentConfig::parse(&cfg.to_config_string()).unwrap(),
        cfg
    );
}

#[test]
fn fig2_preset_values() {
    let cfg = ExperimentConfig::fig2();
    let n = cfg.network;
    assert_eq!((n.n_bs, n.n_mu, n.n_src), (8, 400, 4));
    assert_eq!((n.area, n.beta, n.alpha), (4e6, 1.0, 4.0));
    assert_eq!((cfg.mu, cfg.slot_period), (0.064, 600.0));
}
