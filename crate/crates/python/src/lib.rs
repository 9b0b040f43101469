//! Python bindings. Every function takes program text rather than a path.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use dcbpv::equality::eliminate_complex_values;
use dcbpv::laws::{check_law_file, check_theory};
use dcbpv::machine::{self, compact, Outcome, Scheduler};
use dcbpv::model::DEFAULT_CAP;
use dcbpv::source::parse_src_program;
use dcbpv::surface::{self, print_ctype, print_program, ProgramFile};
use dcbpv::syntax::{CType, Comp};
use dcbpv::translate::{translate_program, Strategy};
use dcbpv::typecheck::{check_program, CheckOptions, Variant};

create_exception!(dcbpv_py, DcbpvError, PyException);
create_exception!(dcbpv_py, ParseError, DcbpvError);
create_exception!(dcbpv_py, CheckError, DcbpvError);
create_exception!(dcbpv_py, TranslateError, DcbpvError);
create_exception!(dcbpv_py, MachineError, DcbpvError);

fn variant_arg(name: Option<&str>, file: Option<&ProgramFile>, default: Variant) -> PyResult<Variant> {
    match name {
        Some(n) => Variant::from_name(n).ok_or_else(|| PyValueError::new_err(format!("unknown variant `{n}`"))),
        None => Ok(file
            .and_then(|f| f.pragma("variant"))
            .and_then(Variant::from_name)
            .unwrap_or(default)),
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Minus => "minus",
        Variant::Plus => "plus",
    }
}

struct Loaded {
    file: ProgramFile,
    ty: CType,
    main: Comp,
}

fn load(text: &str, variant: Option<&str>, shrink: bool) -> PyResult<(Loaded, Variant)> {
    let file = surface::parse(text).map_err(|e| ParseError::new_err(e.to_string()))?;
    let Some(main) = file.main.clone() else {
        return Err(ParseError::new_err("the program has no `main`"));
    };
    let variant = variant_arg(variant, Some(&file), Variant::Minus)?;
    let mut opts = CheckOptions::new(variant, &file.signature);
    opts.allow_shrink = shrink;
    check_program(&main.body, &main.ty, &opts, &file.signature).map_err(|e| CheckError::new_err(e.render()))?;
    Ok((Loaded { file, ty: main.ty, main: main.body }, variant))
}

/// Type-checks a program and returns its type.
#[pyfunction]
#[pyo3(signature = (text, variant=None, shrink=true))]
fn check(text: &str, variant: Option<&str>, shrink: bool) -> PyResult<String> {
    let (l, _) = load(text, variant, shrink)?;
    Ok(print_ctype(&l.ty, 0))
}

fn outcome_dict<'py>(py: Python<'py>, o: &Outcome, l: &Loaded) -> PyResult<Bound<'py, PyDict>> {
    let sig = &l.file.signature;
    let d = PyDict::new(py);
    match o {
        Outcome::Terminal { kind, printed, state, steps } => {
            d.set_item("kind", kind.label())?;
            d.set_item("value", kind.detail().map(|s| compact(&s)))?;
            d.set_item("printed", sig.render_monoid(printed))?;
            d.set_item("state", state)?;
            d.set_item("steps", steps)?;
        }
        Outcome::FuelExhausted { last, steps } => {
            d.set_item("kind", "FuelExhausted")?;
            d.set_item("value", py.None())?;
            d.set_item("printed", sig.render_monoid(&last.printed))?;
            d.set_item("state", &last.state)?;
            d.set_item("steps", steps)?;
        }
    }
    d.set_item("line", o.render(sig))?;
    Ok(d)
}

/// Runs a checked program on the machine. `scheduler` is `first`,
/// `fixed:1,2`, `seeded:<n>` or `all`; the result lists one outcome per run.
#[pyfunction]
#[pyo3(signature = (text, variant=None, scheduler="first", fuel=10_000))]
fn run<'py>(
    py: Python<'py>,
    text: &str,
    variant: Option<&str>,
    scheduler: &str,
    fuel: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let scheduler = match Scheduler::parse(scheduler) {
        Some(Scheduler::Interactive) | None => {
            return Err(PyValueError::new_err(format!("unsupported scheduler `{scheduler}`")))
        }
        Some(s) => s,
    };
    let (l, _) = load(text, variant, true)?;
    let m = eliminate_complex_values(&l.main);
    let sig = &l.file.signature;
    let outcomes = if scheduler == Scheduler::All {
        machine::run_all(&m, sig, fuel)
    } else {
        machine::run(&m, sig, &scheduler, fuel).map(|o| vec![o])
    }
    .map_err(|e| MachineError::new_err(e.to_string()))?;
    outcomes.iter().map(|o| outcome_dict(py, o, &l)).collect()
}

/// Translates a source program and returns the printed target program.
#[pyfunction]
#[pyo3(signature = (text, strategy="cbv", variant="plus"))]
fn translate(text: &str, strategy: &str, variant: &str) -> PyResult<String> {
    let strategy = match strategy {
        "cbv" => Strategy::Cbv,
        "cbn" => Strategy::Cbn,
        s => return Err(PyValueError::new_err(format!("unknown strategy `{s}`"))),
    };
    let variant = variant_arg(Some(variant), None, Variant::Plus)?;
    let src = parse_src_program(text).map_err(|e| ParseError::new_err(e.to_string()))?;
    let out = translate_program(&src, strategy, variant).map_err(|e| TranslateError::new_err(e.to_string()))?;
    Ok(format!(
        "--! variant {}\n{}",
        variant_name(variant),
        print_program(&out.signature, &out.ty, &out.main)
    ))
}

/// Checks every law in a law file against the finite model. Returns
/// `(name, verdict, equal)` triples.
#[pyfunction]
#[pyo3(signature = (text, variant="plus", cap=DEFAULT_CAP))]
fn model_check(text: &str, variant: &str, cap: usize) -> PyResult<Vec<(String, String, bool)>> {
    let variant = variant_arg(Some(variant), None, Variant::Plus)?;
    let reports = check_law_file(text, variant, cap).map_err(|e| DcbpvError::new_err(e.to_string()))?;
    Ok(reports
        .into_iter()
        .map(|r| (r.name, r.verdict.to_string(), r.verdict.is_equal()))
        .collect())
}

/// The built-in equational theory over every base size and error count up to
/// the bounds. Returns `(name, base_size, errors, equal)` rows.
#[pyfunction]
#[pyo3(signature = (max_base=4, max_errors=2, cap=DEFAULT_CAP))]
fn theory(max_base: usize, max_errors: usize, cap: usize) -> PyResult<Vec<(String, usize, usize, bool)>> {
    let rows = check_theory(max_base, max_errors, cap).map_err(|e| DcbpvError::new_err(e.to_string()))?;
    Ok(rows
        .into_iter()
        .map(|r| (r.name, r.base_size, r.errors, r.verdict.is_equal()))
        .collect())
}

#[pymodule]
fn dcbpv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DcbpvError", py.get_type::<DcbpvError>())?;
    m.add("ParseError", py.get_type::<ParseError>())?;
    m.add("CheckError", py.get_type::<CheckError>())?;
    m.add("TranslateError", py.get_type::<TranslateError>())?;
    m.add("MachineError", py.get_type::<MachineError>())?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(model_check, m)?)?;
    m.add_function(wrap_pyfunction!(theory, m)?)?;
    Ok(())
}
