use std::f64::consts::PI;

use nonres_core::arithmetic::build_tables;
use nonres_core::characters::{enumerate_characters, gcd, least_nonresidue};
use nonres_core::explicit::{residual_report, FormulaVariant};
use nonres_core::kernel::{select_yk, KernelParams};
use nonres_core::lfunc::{build_archive, l_value, scan_critical_zeros, ScanConfig, ZeroArchive};
use nonres_core::par::Exec;
use nonres_core::{Character, CharacterLabel, Complex64};
use proptest::prelude::*;

fn chi(label: &str) -> Character {
    Character::from_label(label.parse::<CharacterLabel>().unwrap()).unwrap()
}

#[test]
fn archive_file_feeds_the_explicit_formula() {
    let c = chi("4.3");
    let (archive, reports) = build_archive(std::slice::from_ref(&c), 40.0, &ScanConfig::default()).unwrap();
    assert!(reports[0].complete);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.csv");
    archive.save(&path).unwrap();
    let loaded = ZeroArchive::load(&path).unwrap();
    assert_eq!(loaded.to_csv_string(), archive.to_csv_string());

    let p = KernelParams::new(40.0, select_yk(2.0, 0), 2.0).unwrap();
    let tables = build_tables(200).unwrap();
    let a = residual_report(&c, FormulaVariant::windowed(&p), &archive, 40.0, &tables).unwrap();
    let b = residual_report(&c, FormulaVariant::windowed(&p), &loaded, 40.0, &tables).unwrap();
    assert_eq!(a.residual.re.to_bits(), b.residual.re.to_bits());
    assert!(a.residual_scale < 0.15, "{}", a.residual_scale);
}

#[test]
fn execution_mode_does_not_change_results() {
    let c = chi("7.3");
    let seq = ScanConfig { exec: Exec::Sequential, ..ScanConfig::default() };
    let par = ScanConfig { exec: Exec::Parallel, ..ScanConfig::default() };
    let a = scan_critical_zeros(&c, -15.0, 15.0, &seq).unwrap();
    let b = scan_critical_zeros(&c, -15.0, 15.0, &par).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(!a.zeros.is_empty());
}

#[test]
fn dirichlet_beta_values() {
    // L(1, χ₋₄) = π/4 and L(3, χ₋₄) = π³/32
    let c = chi("4.3");
    assert!((l_value(Complex64::new(1.0, 0.0), &c).unwrap().re - PI / 4.0).abs() < 1e-13);
    assert!((l_value(Complex64::new(3.0, 0.0), &c).unwrap().re - PI.powi(3) / 32.0).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_are_completely_multiplicative(q in 2u64..400, pick in 0usize..1000, m in 0u64..2000, n in 0u64..2000) {
        let all = enumerate_characters(q).unwrap();
        let c = &all[pick % all.len()];
        let lhs = c.value_complex((m * n) % q);
        let rhs = c.value_complex(m % q) * c.value_complex(n % q);
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert_eq!(c.value_complex(m % q).norm() > 0.5, gcd(m, q) == 1);
    }

    #[test]
    fn least_nonresidue_is_minimal(q in 3u64..400, pick in 0usize..1000) {
        let all: Vec<Character> = enumerate_characters(q).unwrap().into_iter().filter(|c| !c.is_principal()).collect();
        let c = &all[pick % all.len()];
        let n = least_nonresidue(c).unwrap();
        let one = Complex64::new(1.0, 0.0);
        prop_assert!(gcd(n, q) == 1 && (c.value_complex(n % q) - one).norm() > 1e-9);
        for m in 1..n {
            prop_assert!(gcd(m, q) != 1 || (c.value_complex(m % q) - one).norm() < 1e-9);
        }
    }
}
