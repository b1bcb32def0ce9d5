use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let module = pyo3::wrap_pymodule!(lie_index_py::lie_index_py)(py);
        let locals = PyDict::new(py);
        locals.set_item("li", module).unwrap();
        if let Err(e) = py.run(code, None, Some(&locals)) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn d8_from_family() {
    run(c"
g = li.Group.family('dihedral', [8])
assert g.order == 8 and g.name == 'dihedral(8)'
assert g.is_nilpotent() and g.nilpotency_class() == 2 and g.derived_order() == 2
r = g.analyze(units=True)
assert (r.tU_jennings, r.tU_direct, r.tL_direct, r.unit_class) == (3, 3, 3, 2)
assert r.verdict == 'consistent' and r.matches == [] and r.failed_checks() == []
assert g.lie_indices(2) == (3, 3)
assert g.unit_class() == 2
");
}

#[test]
fn witness_from_json() {
    run(c"
import json
doc = {'name': 'd16xd8', 'kind': 'product', 'factors': [
    {'name': 'a', 'kind': 'family', 'family': 'dihedral', 'params': [16]},
    {'name': 'b', 'kind': 'family', 'family': 'dihedral', 'params': [8]}]}
g = li.Group.from_json(json.dumps(doc))
r = g.analyze()
assert r.order == 128 and r.matches == ['T2.ii'] and r.tU_jennings == 6
assert json.loads(r.to_json())['d_sequence'] == {'2': 2, '3': 1}
s = json.loads(li.summarize_reports([r]))
assert s['groups'] == 1 and s['coverage']['T2.ii'] == ['d16xd8']
");
}

#[test]
fn errors_map_to_exceptions() {
    run(c"
try:
    li.Group.from_json('{')
    raise AssertionError('no error')
except ValueError as e:
    assert 'parse error' in str(e)
try:
    li.Group.family('dihedral', [64], cap=32)
    raise AssertionError('no error')
except MemoryError:
    pass
s3 = li.Group.family('dihedral', [6])
assert s3.analyze().verdict == 'not applicable'
try:
    s3.unit_class()
    raise AssertionError('no error')
except ValueError:
    pass
");
}
