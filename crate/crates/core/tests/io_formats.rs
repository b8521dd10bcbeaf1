use kerr_phase::io::{read_binary, write_field_binary, write_field_csv, write_vector_binary, write_vector_csv, Format};
use kerr_phase::{PhaseGrid, ScalarField, VectorField};
use serde_json::json;

fn sample() -> ScalarField {
    let g = PhaseGrid::new(-2.0, 3.0, -1.0, 1.0, 41, 33).unwrap();
    ScalarField::from_fn(g, "f", |x, p| (x * 1.3).sin() * (-p * p).exp() / 3.0)
}

#[test]
fn binary_round_trip_is_exact() {
    let f = sample();
    let mut buf = Vec::new();
    write_field_binary(&mut buf, &f, &json!({ "t": 0.5 })).unwrap();
    let (header, grid, arrays) = read_binary(&mut buf.as_slice()).unwrap();
    assert_eq!(header["meta"]["t"], 0.5);
    assert_eq!(grid, f.grid);
    assert_eq!(arrays, vec![f.values.clone()]);

    let v = VectorField::new(f.grid, f.values.clone(), f.values.mapv(|x| -2.0 * x), "J").unwrap();
    let mut buf = Vec::new();
    write_vector_binary(&mut buf, &v, &json!({})).unwrap();
    let (_, _, arrays) = read_binary(&mut buf.as_slice()).unwrap();
    assert_eq!(arrays, vec![v.x.clone(), v.p.clone()]);
}

#[test]
fn csv_round_trips_every_value() {
    let f = sample();
    let mut buf = Vec::new();
    write_field_csv(&mut buf, &f, &json!({ "hash": "abc" })).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("# meta: {\"hash\":\"abc\"}\nx,p,value\n"));
    assert!(!text.contains('\r'));
    let parsed: Vec<f64> = text.lines().skip(2).map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    let expected: Vec<f64> = f.values.iter().copied().collect();
    assert_eq!(parsed, expected);
}

#[test]
fn vector_csv_stride() {
    let f = sample();
    let v = VectorField::new(f.grid, f.values.clone(), f.values.clone(), "J").unwrap();
    let mut buf = Vec::new();
    write_vector_csv(&mut buf, &v, 4, &json!({})).unwrap();
    let rows = String::from_utf8(buf).unwrap().lines().count() - 2;
    assert_eq!(rows, 11 * 9);
}

#[test]
fn bad_magic_is_rejected() {
    assert!(read_binary(&mut &b"NOPE\0\0\0\0"[..]).is_err());
    assert_eq!(Format::Binary.extension(), "kwf");
}
