use valseries::selftest::{run_all, suite_names};

#[test]
fn verdicts_do_not_depend_on_the_seed() {
    for seed in 1..=20 {
        let reports = run_all(seed, None);
        assert_eq!(reports.iter().map(|r| r.name).collect::<Vec<_>>(), suite_names());
        for r in reports {
            assert!(r.passed(), "seed {seed}: {r}");
        }
    }
}
