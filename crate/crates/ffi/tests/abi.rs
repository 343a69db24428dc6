use std::ffi::{CStr, CString};
use std::ptr;

use sobolev_lab_ffi::*;

fn manifold(description: &str) -> *mut SlManifold {
    let mut m = ptr::null_mut();
    let description = CString::new(description).unwrap();
    assert_eq!(unsafe { sl_manifold_parse(description.as_ptr(), &mut m) }, SlStatus::Ok);
    m
}

fn last_error() -> String {
    let p = sl_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn geometry_through_the_abi() {
    let s2 = manifold("sphere(2)");
    unsafe {
        assert_eq!(sl_manifold_ambient_dim(s2), 3);
        assert_eq!(sl_manifold_intrinsic_dim(s2), 2);
        let (x, y) = ([0.0, 0.0, 1.0], [0.6, 0.0, 0.8]);
        let mut v = [0.0; 3];
        assert_eq!(sl_manifold_log(s2, x.as_ptr(), y.as_ptr(), v.as_mut_ptr()), SlStatus::Ok);
        let mut back = [0.0; 3];
        assert_eq!(sl_manifold_exp(s2, x.as_ptr(), v.as_ptr(), back.as_mut_ptr()), SlStatus::Ok);
        for k in 0..3 {
            assert!((back[k] - y[k]).abs() < 1e-12);
        }
        let w = [0.0, 1.0, 0.0];
        let mut pw = [0.0; 3];
        assert_eq!(sl_manifold_transport(s2, x.as_ptr(), y.as_ptr(), w.as_ptr(), pw.as_mut_ptr()), SlStatus::Ok);
        assert!((pw[1] - 1.0).abs() < 1e-12);
        let mut d = 0.0;
        let south = [0.0, 0.0, -1.0];
        assert_eq!(sl_manifold_log(s2, x.as_ptr(), south.as_ptr(), v.as_mut_ptr()), SlStatus::Singularity);
        assert!(last_error().contains("antipodal"));
        assert_eq!(sl_manifold_distance(s2, x.as_ptr(), y.as_ptr(), &mut d), SlStatus::Ok);
        assert!(sl_last_error_message().is_null());
        sl_manifold_free(s2);
    }
}

#[test]
fn errors_and_null_handling() {
    let mut m = ptr::null_mut();
    let bad = CString::new("torus(2)").unwrap();
    unsafe {
        assert_eq!(sl_manifold_parse(bad.as_ptr(), &mut m), SlStatus::Parse);
        assert!(m.is_null());
        assert_eq!(sl_manifold_parse(ptr::null(), &mut m), SlStatus::NullPointer);
        let mut d = 0.0;
        assert_eq!(sl_manifold_distance(ptr::null(), ptr::null(), ptr::null(), &mut d), SlStatus::NullPointer);
        let off = [0.0, 0.0, 2.0];
        let s2 = manifold("sphere(2)");
        assert_eq!(sl_manifold_distance(s2, off.as_ptr(), off.as_ptr(), &mut d), SlStatus::NotOnManifold);
        let mut g = 0.0;
        assert_eq!(sl_lambda_metric(1.5, 0.0, 0.0, 0.0, 0.0, &mut g), SlStatus::Contract);
        assert_eq!(sl_lambda_metric(0.0, 0.0, 1.0, 0.0, 0.0, &mut g), SlStatus::DegenerateMetric);
        assert_eq!(sl_map_len(ptr::null()), 0);
        sl_map_free(ptr::null_mut());
        sl_manifold_free(s2);
    }
}

#[test]
fn maps_roundtrip_through_csv() {
    let circle = manifold("circle");
    let n = 129;
    let values: Vec<f64> = (0..n)
        .flat_map(|i| {
            let t = i as f64 / (n - 1) as f64;
            [(2.0 * t).cos(), (2.0 * t).sin()]
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("u.csv").to_str().unwrap()).unwrap();
    unsafe {
        let mut u = ptr::null_mut();
        assert_eq!(sl_map_new_interval(0.0, 1.0, n, circle, values.as_ptr(), &mut u), SlStatus::Ok);
        assert_eq!(sl_map_len(u), n);
        let mut e = 0.0;
        assert_eq!(sl_map_energy(u, 2.0, &mut e), SlStatus::Ok);
        assert!((e - 4.0).abs() < 1e-3);
        assert_eq!(sl_map_energy(u, 0.5, &mut e), SlStatus::Contract);

        assert_eq!(sl_map_save_csv(u, path.as_ptr()), SlStatus::Ok);
        let mut w = ptr::null_mut();
        assert_eq!(sl_map_load_csv(path.as_ptr(), &mut w), SlStatus::Ok);
        let mut d = -1.0;
        let mut bound = -1;
        for kind in [SlDistanceKind::Sasaki, SlDistanceKind::CheegerGromoll, SlDistanceKind::Iota, SlDistanceKind::Chiron, SlDistanceKind::Dot] {
            assert_eq!(sl_map_distance(u, w, kind, 2.0, &mut d, &mut bound), SlStatus::Ok);
            assert_eq!(d, 0.0, "{kind:?}");
        }
        assert_eq!(sl_map_distance(u, w, SlDistanceKind::CheegerGromoll, 2.0, &mut d, ptr::null_mut()), SlStatus::Ok);
        assert_eq!(sl_map_measure_distance(u, w, &mut d), SlStatus::Ok);
        assert_eq!(d, 0.0);

        let short = ptr::null_mut::<SlMap>();
        let mut other = short;
        assert_eq!(sl_map_new_interval(0.0, 1.0, 65, circle, values.as_ptr(), &mut other), SlStatus::Ok);
        assert_eq!(sl_map_distance(u, other, SlDistanceKind::Iota, 2.0, &mut d, &mut bound), SlStatus::GridMismatch);

        let missing = CString::new("/nonexistent/u.csv").unwrap();
        assert_eq!(sl_map_load_csv(missing.as_ptr(), &mut w), SlStatus::Io);
        sl_map_free(other);
        sl_map_free(w);
        sl_map_free(u);
        sl_manifold_free(circle);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(sl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
