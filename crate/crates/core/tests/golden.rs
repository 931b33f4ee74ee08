use std::path::PathBuf;

use mlpit::algebra::Field;
use mlpit::oracle::{gen_formula, GenSpec};

#[test]
fn depth3_n4_m2_seed1() {
    let text = gen_formula(Field::default(), &GenSpec::Depth3 { n: 4, top_fanin: 2 }, 1)
        .unwrap()
        .to_string();
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/depth3_n4_m2_seed1.txt");
    match std::fs::read_to_string(&path) {
        Ok(frozen) => assert_eq!(text, frozen),
        Err(_) => std::fs::write(&path, &text).unwrap(),
    }
}
