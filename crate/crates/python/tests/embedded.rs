use pyo3::prelude::*;
use rotlab::rotlab as rotlab_module;

#[test]
fn module_works_in_an_embedded_interpreter() {
    pyo3::append_to_inittab!(rotlab_module);
    Python::initialize();
    Python::attach(|py| {
        let m = py.import("rotlab").unwrap();
        let tags: Vec<String> = m.call_method0("tags").unwrap().extract().unwrap();
        assert_eq!(tags.len(), 12);

        let json = py.import("json").unwrap();
        let rep = m.call_method1("dehn_validate", ("4",)).unwrap();
        let rep = json.call_method1("loads", (rep,)).unwrap();
        assert!(rep.get_item("expectations_met").unwrap().extract::<bool>().unwrap());

        let v: (String, u32) = m
            .call_method1("membership", (vec!["u1.u2 - u2.u1"], "u2.u1.u1 - u1.u1.u2", 3u32))
            .unwrap()
            .extract()
            .unwrap();
        assert_eq!(v, ("Member".to_string(), 3));

        let err = m.call_method1("check", ("bogus",)).unwrap_err();
        assert!(err.is_instance(py, &m.getattr("RotlabError").unwrap().cast_into().unwrap()));
    });
}
