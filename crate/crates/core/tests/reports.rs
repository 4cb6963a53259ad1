use rmt_core::identities::{lookup, registry, run_identity, run_negative_controls, Method, Params, Side};

fn with(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn reports_reproduce_bit_for_bit() {
    let p = with(&[("samples", 4000.0)]);
    let mut a = run_identity("I-8.1", &p, 11).unwrap();
    let mut b = run_identity("I-8.1", &p, 11).unwrap();
    a.runtime = None;
    b.runtime = None;
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = run_identity("I-8.1", &p, 12).unwrap();
    assert_ne!(a.lhs, c.lhs);
    assert_eq!(a.seed, 11);
}

#[test]
fn report_shape_follows_method() {
    let e = run_identity("I-5.3a", &Params::new(), 1).unwrap();
    assert_eq!(e.method, Method::Exact);
    assert!(matches!(e.lhs, Side::Value(_)) && e.abs_err.is_some() && e.pass);
    let s = run_identity("I-5.3-G", &with(&[("samples", 3000.0)]), 1).unwrap();
    assert!(matches!(s.lhs, Side::Tests(ref t) if t.len() == 5));
    assert!(s.abs_err.is_none() && s.rel_err.is_none());
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v["method"], "statistical");
    assert_eq!(v["parameters"]["samples"], 3000);
}

#[test]
fn every_registered_id_resolves() {
    assert!(registry().len() >= 40);
    for i in registry() {
        assert_eq!(lookup(i.id).unwrap().method, i.method);
    }
}

#[test]
fn negative_controls_fail() {
    let r = run_negative_controls(&Params::new(), 3).unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|r| !r.pass));
}
