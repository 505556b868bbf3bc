use ahkit::ahp1::{self, Model};
use ahkit::assets::Catalog;
use ahkit::connections::{find_vertical_gauge, intertwiner_space, verify_gauge, GaugeOutcome};

#[test]
fn kappa_is_biunitary() {
    let cat = Catalog::embedded();
    let m = Model::load(&cat).unwrap();
    let r = m.kappa.check_biunitary().unwrap();
    assert!(r.passed(), "{:?}", r.failures.first());
}

#[test]
fn kappa_kappa_bar_contains_identity_once() {
    let cat = Catalog::embedded();
    let m = Model::load(&cat).unwrap();
    let sp = intertwiner_space(&m.identity, &m.kk).unwrap();
    assert_eq!(sp.dim, 1);
    let res = ahkit::connections::intertwining_residuals(&m.identity, &m.kk, &m.r_kappa).unwrap();
    assert!(res.is_empty(), "{:?}", res.first());
}

#[test]
fn rho_from_table_is_biunitary() {
    let cat = Catalog::embedded();
    let m = Model::load(&cat).unwrap();
    let r = m.rho.check_biunitary().unwrap();
    assert!(r.passed(), "{:?}", r.failures.first());
    let res = ahkit::connections::intertwining_residuals(&m.rho, &m.kk, &m.v).unwrap();
    assert!(res.is_empty(), "{:?}", res.first());
}

#[test]
fn appendix_gauge_and_alpha_dims() {
    let cat = Catalog::embedded();
    let m = Model::load(&cat).unwrap();
    let a = m.alpha.clone();
    let rak = m.rak(&a).unwrap();
    let arak = m.arak(&a).unwrap();
    let g = ahp1::gauge_map(&cat.gauge(ahp1::APPENDIX).unwrap(), &rak, &arak).unwrap();
    let rep = verify_gauge(&rak, &arak, &g).unwrap();
    assert!(rep.passed(), "{:?}", rep.residuals.first());
    match find_vertical_gauge(&rak, &arak).unwrap() {
        GaugeOutcome::Found(h) => assert!(ahp1::equal_up_to_sign(&g, &h).is_some()),
        o => panic!("{:?}", o),
    }
    let t = m.alpha_trivial();
    let d = intertwiner_space(&m.rak(&t).unwrap(), &m.arak(&t).unwrap()).unwrap().dim;
    assert_eq!(d, 0);
}
