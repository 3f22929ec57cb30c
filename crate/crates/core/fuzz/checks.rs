//! Per-target checks, shared by the fuzz targets and the corpus replay test.

use conjmatch::cli::{parse_match_json, Config};
use conjmatch::evaluation::GroundTruth;
use conjmatch::geometry::io::{
    parse_contour_csv, parse_contour_json, parse_mesh, write_contour_csv, write_contour_json, write_obj, write_off,
    write_ply,
};
use conjmatch::geometry::{MeshFormat, TriMesh};

pub type Check = fn(&[u8]);

pub const TARGETS: &[(&str, Check)] = &[
    ("contour_csv", contour_csv),
    ("contour_json", contour_json),
    ("mesh_off", mesh_off),
    ("mesh_obj", mesh_obj),
    ("mesh_ply", mesh_ply),
    ("config_toml", config_toml),
    ("match_json", match_json),
    ("ground_truth_json", ground_truth_json),
];

pub fn contour_csv(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_contour_csv(text) {
        let again = parse_contour_csv(&write_contour_csv(&c)).expect("written contour parses");
        assert_eq!(again.vertices(), c.vertices());
    }
}

pub fn contour_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = parse_contour_json(text) {
        let again = parse_contour_json(&write_contour_json(&c)).expect("written contour parses");
        assert_eq!(again.vertices(), c.vertices());
        assert_eq!(again.is_closed(), c.is_closed());
    }
}

fn mesh_round_trip(data: &[u8], format: MeshFormat, write: fn(&TriMesh) -> String) {
    if let Ok(m) = parse_mesh(data, format) {
        let again = parse_mesh(write(&m).as_bytes(), format).expect("written mesh parses");
        assert_eq!(again.vertices(), m.vertices());
        assert_eq!(again.faces(), m.faces());
    }
}

pub fn mesh_off(data: &[u8]) {
    mesh_round_trip(data, MeshFormat::Off, write_off);
}

pub fn mesh_obj(data: &[u8]) {
    mesh_round_trip(data, MeshFormat::Obj, write_obj);
}

pub fn mesh_ply(data: &[u8]) {
    mesh_round_trip(data, MeshFormat::Ply, write_ply);
}

pub fn config_toml(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::from_toml(text) {
        cfg.validate().expect("parsed configs are valid");
    }
}

pub fn match_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_match_json(text) {
        assert_eq!(parse_match_json(&doc.to_json()).expect("written document parses"), doc);
    }
}

pub fn ground_truth_json(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(gt) = GroundTruth::from_json(text) {
        let _ = gt.validate(gt.gt.len(), gt.seg3d.len());
    }
}
