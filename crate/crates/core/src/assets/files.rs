//! Embedded copies of the shipped asset files.

pub const MANIFEST: &str = include_str!("../../assets/manifest.json");

pub const FILES: &[(&str, &str)] = &[
    ("ahp1/principal_graph.json", include_str!("../../assets/ahp1/principal_graph.json")),
    ("ahp1/dual_graph.json", include_str!("../../assets/ahp1/dual_graph.json")),
    ("ahp1/kappa_connection.json", include_str!("../../assets/ahp1/kappa_connection.json")),
    ("ahp1/alpha_connection.json", include_str!("../../assets/ahp1/alpha_connection.json")),
    ("ahp1/table1_r_kappa.as_printed.json", include_str!("../../assets/ahp1/table1_r_kappa.as_printed.json")),
    ("ahp1/table1_r_kappa.corrected.json", include_str!("../../assets/ahp1/table1_r_kappa.corrected.json")),
    ("ahp1/table2_v.as_printed.json", include_str!("../../assets/ahp1/table2_v.as_printed.json")),
    ("ahp1/table2_v.corrected.json", include_str!("../../assets/ahp1/table2_v.corrected.json")),
    ("ahp1/appendix_a_gauge.as_printed.json", include_str!("../../assets/ahp1/appendix_a_gauge.as_printed.json")),
    ("ahp1/appendix_a_gauge.corrected.json", include_str!("../../assets/ahp1/appendix_a_gauge.corrected.json")),
    ("ah4/ring.fus", include_str!("../../assets/ah4/ring.fus")),
    ("2ah/principal_graph.json", include_str!("../../assets/2ah/principal_graph.json")),
    ("fusion/small_rings.fus", include_str!("../../assets/fusion/small_rings.fus")),
];
