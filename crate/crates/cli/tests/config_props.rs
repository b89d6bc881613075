use proptest::prelude::*;

use cone_auglag_cli::config::RunConfig;

proptest! {
    #[test]
    fn run_config_round_trips(
        seed in prop::option::of(any::<u64>()),
        problem in prop::option::of("[a-z0-9-]{1,12}"),
        c in prop::option::of(prop::collection::vec(1e-3..1e6f64, 1..5)),
        lambda in prop::option::of(prop::collection::vec(-1e3..1e3f64, 0..4)),
        tol in prop::option::of(1e-12..1.0f64),
        max_outer in 1usize..500,
        alpha in 1e-3..10.0f64,
        radius in 1e-2..100.0f64,
    ) {
        let mut cfg = RunConfig { seed, problem, c, lambda, tol, ..RunConfig::default() };
        cfg.alm.max_outer = max_outer;
        cfg.exact_params.barrier.alpha = alpha;
        cfg.saddle.radius = radius;
        let text = cfg.to_json();
        let back = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back.hash(), cfg.hash());
    }
}
