//! Run every catalog entry through every suite: nothing may fail or error,
//! inapplicable rows must be skipped with a reason, and fixtures must
//! exercise the rows they exist for.

use curvcheck::catalog::{self, Params};
use curvcheck::checks::{run_suite, CheckStatus, Suite};

#[test]
fn every_fixture_passes_every_applicable_suite() {
    for entry in catalog::entries() {
        let fixture = catalog::build(entry.name, &Params::new()).unwrap();
        let report = run_suite(&fixture, &Suite::all(), 3, 1234, 0.0, None);
        for c in &report.checks {
            assert_ne!(
                c.status,
                CheckStatus::Errored,
                "{}::{} errored: {:?}",
                entry.name,
                c.id,
                c.reason
            );
            assert_ne!(
                c.status,
                CheckStatus::Fail,
                "{}::{} failed: max residual {:.3e} vs tol {:.1e}",
                entry.name,
                c.id,
                c.max_scaled_residual,
                c.tolerance
            );
            if c.status == CheckStatus::Skipped {
                assert!(
                    c.reason.is_some(),
                    "{}::{} skipped silently",
                    entry.name,
                    c.id
                );
            }
        }
        assert!(report.pass, "{} report failed overall", entry.name);
    }
}

#[test]
fn fixtures_exercise_their_dedicated_rows() {
    let expectations: &[(&str, &[&str])] = &[
        ("sinyukov", &["structure.sinyukov", "structure.genweyl", "structure.trace_form"]),
        ("quasi_codazzi", &["structure.quasi_codazzi"]),
        ("weakly_symmetric", &["structure.weak_symmetry"]),
        (
            "constant_curvature",
            &[
                "structure.concircular",
                "structure.pseudo_k_recurrence",
                "compat.const_curvature_any_b",
                "abc.transfer_converse.projective",
            ],
        ),
        (
            "gnomonic_pair",
            &["geodesic.pair_link", "geodesic.pair_gbar_compat"],
        ),
        (
            "schwarzschild",
            &["gr.vacuum", "gr.h_zero", "gr.e_nonzero_control"],
        ),
        ("frw", &["gr.conformally_flat", "gr.weyl_divergence"]),
        ("qcc_point", &["purity.qcc_identity", "purity.qcc_pure"]),
        (
            "weyl_compatible_point",
            &["gr.point_h_zero", "gr.point_e_routes"],
        ),
    ];
    for (name, ids) in expectations {
        let fixture = catalog::build(name, &Params::new()).unwrap();
        let report = run_suite(&fixture, &Suite::all(), 3, 77, 0.0, None);
        for id in *ids {
            let row = report
                .checks
                .iter()
                .find(|c| c.id == *id)
                .unwrap_or_else(|| panic!("{name}: row {id} missing"));
            assert_eq!(
                row.status,
                CheckStatus::Pass,
                "{name}: row {id} is {:?} ({:?})",
                row.status,
                row.reason
            );
        }
    }
}
