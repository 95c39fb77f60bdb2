use dicke_witness::combinatorics::{binomial, lemma10_max, max_split_product, ratio, rational_from_u64};
use dicke_witness::robustness::{build_witness, figure_data, p_crit, Criterion, Figure, FigureData};
use dicke_witness::verification::{biseparable_sampling_check, block_singular_values, fully_ppt_check};
use dicke_witness::{DickeSpec, Family};

use crate::output::{emit, Cell, Table};
use crate::{Check, Cli, Command, VerifyArgs};

/// Largest `N` accepted by the split-product check.
const MAX_LEMMA_N: usize = 200;

/// Tolerance for singular values against their closed form.
const SVD_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] dicke_witness::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(dicke_witness::Error::Internal(_)) => 1,
            _ => 2,
        }
    }
}

fn required<T>(v: Option<T>, flag: &str, check: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {check}")))
}

fn default_k(family: Family, n: usize, k: Option<usize>) -> Result<usize, CliError> {
    match (k, family) {
        (Some(k), _) => Ok(k),
        (None, Family::HalfFilling) => Ok(n / 2),
        (None, Family::WState | Family::OverlapShift) => Ok(1),
        (None, f) => Err(CliError::Usage(format!("--k is required for family {f}"))),
    }
}

/// Runs the command and writes its output. `Ok(false)` means a verification
/// check failed.
pub fn run(cli: &Cli, command_line: &str) -> Result<bool, CliError> {
    let (table, passed) = match &cli.command {
        Command::Witness { family, n, k } => (witness_table(*family, *n, *k)?, true),
        Command::Pcrit { family, n, k } => (pcrit_table(*family, *n, *k)?, true),
        Command::Compare { figure, nmax } => {
            (compare_table(*figure, nmax.unwrap_or(figure.default_n_max()))?, true)
        }
        Command::Verify(args) => verify_table(args)?,
    };
    emit(&table.render(cli.format, command_line), cli.out.as_deref())?;
    Ok(passed)
}

fn witness_table(family: Family, n: usize, k: Option<usize>) -> Result<Table, CliError> {
    let k = default_k(family, n, k)?;
    let w = build_witness(family, n, k)?;
    let mut t = Table::new("witness", &["family", "n", "k", "i", "omega", "omega_sq_exact"]);
    for i in w.levels() {
        t.push(vec![
            family.tag().into(),
            n.into(),
            k.into(),
            i.into(),
            w.omega(i).into(),
            w.exact_squares[i].clone().into(),
        ]);
    }
    Ok(t)
}

fn pcrit_table(criterion: Criterion, n: usize, k: Option<usize>) -> Result<Table, CliError> {
    let k = match criterion {
        Criterion::Witness(f) => default_k(f, n, k)?,
        Criterion::Huber => required(k, "k", "huber")?,
    };
    let rec = p_crit(criterion, n, k)?;
    let mut t = Table::new("pcrit", &["family", "n", "k", "p_crit", "exact"]);
    t.push(vec![
        criterion.tag().into(),
        n.into(),
        k.into(),
        rec.p_crit.into(),
        rec.exact.into(),
    ]);
    Ok(t)
}

fn compare_table(figure: Figure, n_max: usize) -> Result<Table, CliError> {
    let data = figure_data(figure, n_max)?;
    let (schema, columns): (&'static str, &[&'static str]) = match figure {
        Figure::Fig2 => (
            "fig2",
            &["n", "k", "projective", "prop5", "thm6", "projective_exact", "prop5_exact", "thm6_exact"],
        ),
        Figure::Fig3a => ("fig3a", &["n", "k", "refined_minus_huber"]),
        Figure::Fig3b => ("fig3b", &["n", "k", "thm6_vs_huber"]),
        Figure::Fig4 => ("fig4", &["n", "k", "cor8", "prop9", "huber", "huber_exact"]),
    };
    let mut t = Table::new(schema, columns);
    match data {
        FigureData::Comparison(rows) => {
            for row in rows {
                let mut cells: Vec<Cell> = vec![row.n.into(), row.k.into()];
                cells.extend(row.records.iter().map(|r| Cell::from(r.p_crit)));
                match figure {
                    Figure::Fig4 => cells.push(row.records[2].exact.clone().into()),
                    _ => cells.extend(row.records.iter().map(|r| Cell::from(r.exact.clone()))),
                }
                t.push(cells);
            }
        }
        FigureData::Difference(rows) => {
            for row in rows {
                t.push(vec![row.n.into(), row.k.into(), row.value.into()]);
            }
        }
    }
    Ok(t)
}

fn verdict(t: &mut Table, passed: bool) {
    t.notes.push(("result", if passed { "pass" } else { "fail" }.to_owned()));
}

fn verify_table(args: &VerifyArgs) -> Result<(Table, bool), CliError> {
    let (mut t, passed, summary) = match args.check {
        Check::Ppt => verify_ppt(args)?,
        Check::Svd => verify_svd(args)?,
        Check::Lemma10 => verify_lemma10(args)?,
        Check::Bisep => verify_bisep(args)?,
    };
    verdict(&mut t, passed);
    eprintln!("{}: {summary}", if passed { "PASS" } else { "FAIL" });
    Ok((t, passed))
}

type Verified = (Table, bool, String);

fn verify_ppt(args: &VerifyArgs) -> Result<Verified, CliError> {
    let family = required(args.family, "family", "--check ppt")?;
    let n = required(args.n, "n", "--check ppt")?;
    let k = default_k(family, n, args.k)?;
    let report = fully_ppt_check(&build_witness(family, n, k)?, args.tol)?;
    let mut t = Table::new(
        "verify-ppt",
        &[
            "m",
            "subset",
            "min_eigenvalue",
            "gershgorin_bound",
            "random_subset",
            "random_min_eigenvalue",
            "pass",
        ],
    );
    for r in &report.rows {
        t.push(vec![
            r.m.into(),
            r.subset.into(),
            r.min_eigenvalue.into(),
            r.gershgorin_bound.into(),
            r.random_subset.into(),
            r.random_min_eigenvalue.into(),
            r.pass.into(),
        ]);
    }
    let summary = format!(
        "{family} witness for {} is fully PPT: min eigenvalue {:.3e} (tol {:e})",
        report.spec,
        report.min_eigenvalue(),
        args.tol
    );
    Ok((t, report.passed(), summary))
}

fn verify_svd(args: &VerifyArgs) -> Result<Verified, CliError> {
    let n = required(args.n, "n", "--check svd")?;
    let k = required(args.k, "k", "--check svd")?;
    let delta = required(args.delta, "delta", "--check svd")?;
    let x = required(args.x, "x", "--check svd")?;
    let spec = DickeSpec::new(n, k)?;
    let sv = block_singular_values(spec, delta, x)?;
    let mut t = Table::new("verify-svd", &["index", "computed", "predicted"]);
    let len = sv.computed.len().max(sv.predicted.len());
    let cell = |v: Option<&f64>| v.map_or(Cell::Text(String::new()), |x| Cell::Float(*x));
    for i in 0..len {
        t.push(vec![i.into(), cell(sv.computed.get(i)), cell(sv.predicted.get(i))]);
    }
    let passed = sv.matches(SVD_TOL);
    let summary = format!(
        "{} computed vs {} predicted singular values for {spec}, delta = {delta}, x = {x}",
        sv.computed.len(),
        sv.predicted.len()
    );
    Ok((t, passed, summary))
}

fn verify_lemma10(args: &VerifyArgs) -> Result<Verified, CliError> {
    let n_max = args.nmax;
    if !(2..=MAX_LEMMA_N).contains(&n_max) {
        return Err(CliError::Usage(format!("--nmax must lie in 2..={MAX_LEMMA_N}, got {n_max}")));
    }
    let mut t = Table::new(
        "verify-lemma10",
        &["n", "k", "max_value", "expected", "has_1_0", "bound_ok", "pass"],
    );
    let mut all = true;
    for n in 2..=n_max {
        for k in 1..=n / 2 {
            let total = binomial(n as i64, k as i64)?;
            let (max, expected, has_1_0, bound_ok) = if 2 * k < n {
                let split = lemma10_max(n, k)?;
                let expected = binomial(n as i64 - 1, k as i64)?;
                let bound = rational_from_u64((n - k) as u64, n as u64);
                let ok = ratio(&split.max_value, &total) <= bound;
                let has = split.argmax.contains(&(1, 0));
                (split.max_value, Some(expected), Some(has), ok)
            } else {
                let split = max_split_product(n, k);
                let bound = rational_from_u64(n as u64, 2 * (n as u64 - 1));
                let ok = ratio(&split.max_value, &total) <= bound;
                (split.max_value, None, None, ok)
            };
            let pass = bound_ok
                && has_1_0.unwrap_or(true)
                && expected.as_ref().is_none_or(|e| *e == max);
            all &= pass;
            t.push(vec![
                n.into(),
                k.into(),
                max.to_string().into(),
                expected.map_or(String::new(), |e| e.to_string()).into(),
                has_1_0.map_or(String::new(), |b| b.to_string()).into(),
                bound_ok.into(),
                pass.into(),
            ]);
        }
    }
    let summary = format!("split-product maximum and overlap bounds for 2 <= N <= {n_max}");
    Ok((t, all, summary))
}

fn verify_bisep(args: &VerifyArgs) -> Result<Verified, CliError> {
    let family = required(args.family, "family", "--check bisep")?;
    let n = required(args.n, "n", "--check bisep")?;
    let k = default_k(family, n, args.k)?;
    let w = build_witness(family, n, k)?;
    let outcome = biseparable_sampling_check(&w, args.samples, args.seed)?;
    let passed = outcome.min_expectation >= -args.tol;
    let mut t = Table::new(
        "verify-bisep",
        &["family", "n", "k", "samples", "min_expectation", "worst_subset", "pass"],
    );
    t.seed = Some(args.seed);
    t.push(vec![
        family.tag().into(),
        n.into(),
        k.into(),
        outcome.samples.into(),
        outcome.min_expectation.into(),
        outcome.worst_subset.into(),
        passed.into(),
    ]);
    let summary = format!(
        "{} biseparable samples against the {family} witness for {}: min expectation {:.3e}",
        outcome.samples, w.spec, outcome.min_expectation
    );
    Ok((t, passed, summary))
}
