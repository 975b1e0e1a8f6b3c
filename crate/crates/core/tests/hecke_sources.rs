use orthlab_core::heckeseries::{small_lambda_fraction, EigenSource, DEFAULT_PRECISION};

#[test]
fn builtin_sources_at_default_precision() {
    for name in ["delta", "level2", "level5"] {
        let s = EigenSource::builtin(name, DEFAULT_PRECISION).unwrap();
        assert_eq!(s.precision, DEFAULT_PRECISION as u64);
        for p in s
            .primes()
            .take_while(|&p| p <= 10_000)
            .filter(|&p| !s.is_ramified(p))
        {
            assert!(
                s.lambda(p).unwrap().value.abs() <= 2.0 + 1e-12,
                "{name} p={p}"
            );
        }
    }
}

#[test]
fn level2_small_eigenvalue_fraction() {
    let s = EigenSource::level2(DEFAULT_PRECISION).unwrap();
    let frac = small_lambda_fraction(&s, 100_000, 0.1).unwrap();
    // 609 of the 9591 odd primes; the semicircle law predicts about 0.0637.
    assert!((frac - 609.0 / 9591.0).abs() < 1e-12, "{frac}");
}
