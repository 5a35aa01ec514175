use pyo3::prelude::*;
use pyo3::types::PyDict;

use zspecial_py::zspecial_py;

#[test]
fn python_smoke_script() {
    pyo3::append_to_inittab!(zspecial_py);
    pyo3::prepare_freethreaded_python();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../python/smoke_test.py");
    let code = std::fs::read_to_string(path).unwrap();
    Python::with_gil(|py| {
        let globals = PyDict::new_bound(py);
        globals.set_item("__name__", "smoke").unwrap();
        py.run_bound(&code, Some(&globals), None).unwrap();
        let rc: i32 = globals
            .get_item("main")
            .unwrap()
            .unwrap()
            .call0()
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(rc, 0);
    });
}
