use std::f64::consts::PI;
use std::ops::RangeInclusive;

use anyhow::{anyhow, bail, Result};
use partial_search::bounds::{self, BoundConstants};
use partial_search::parallel::{self, Queries, SchemeKind, SchemeResult};
use partial_search::statevec;
use partial_search::{
    apply_sequence, enumerate_max_probability, is_grk_form, render_expected, render_percent,
    table_sweep, Anglesd, OperatorSequence, SearchSpace, State3d,
};

use crate::output::{Cell, OutputRecord, Row};
use crate::{BoundsData, Command, SchemeArg, SpaceArgs, TableKind};

pub fn dispatch(command: &Command) -> Result<OutputRecord> {
    match command {
        Command::Angles(space) => angles(space),
        Command::Simulate { space, seq } => simulate(space, seq),
        Command::Enumerate {
            space,
            ktot,
            all_ties,
        } => enumerate(space, ktot, *all_ties),
        Command::Tables { n, which, ktot } => tables(*n, *which, ktot),
        Command::Bounds {
            n,
            m,
            data,
            ktot_range,
        } => match data {
            BoundsData::Summary => bounds_summary(*n, *m, ktot_range.as_ref()),
            BoundsData::Fig3 => {
                let m = m.ok_or_else(|| anyhow!("--data fig3 needs --m"))?;
                figure3(*n, m, ktot_range.as_ref())
            }
            BoundsData::Fig4 => figure4(*n),
        },
        Command::Parallel {
            scheme,
            n,
            l,
            no_k2,
        } => parallel_cmd(*scheme, n, l, !*no_k2),
        Command::Verify {
            space,
            sequences,
            max_k,
            tol,
            seed,
        } => verify(space, *sequences, *max_k, *tol, *seed),
    }
}

fn search_space(args: &SpaceArgs) -> Result<SearchSpace> {
    Ok(SearchSpace::new(args.n, args.m)?)
}

fn budget(k: u64) -> Result<u32> {
    u32::try_from(k).map_err(|_| anyhow!("k_tot = {k} is out of range"))
}

fn angles(args: &SpaceArgs) -> Result<OutputRecord> {
    let s = search_space(args)?;
    let a: Anglesd = s.angles();
    let mut rec = OutputRecord::new("angles")
        .param("n", s.n())
        .param("m", s.m());
    rec.row(vec![
        ("n", s.n().into()),
        ("m", s.m().into()),
        ("N", s.database_size().into()),
        ("b", s.block_size().into()),
        ("K", s.block_count().into()),
        ("theta1", a.theta1.into()),
        ("theta2", a.theta2.into()),
        ("gamma", a.gamma.into()),
        ("sin_theta1", a.sin_theta1.into()),
        ("sin_theta2", a.sin_theta2.into()),
        ("sin_gamma", a.sin_gamma.into()),
    ]);
    Ok(rec)
}

fn simulate(args: &SpaceArgs, seq: &str) -> Result<OutputRecord> {
    let s = search_space(args)?;
    let seq: OperatorSequence = seq.parse()?;
    let v: State3d = apply_sequence(&s, &seq);
    let block = v.block_probability()?;
    let target = v.target_probability()?;
    let k = seq.total_queries();
    let mut rec = OutputRecord::new("simulate")
        .param("n", s.n())
        .param("m", s.m())
        .param("seq", seq.to_tokens());
    rec.row(vec![
        ("sequence", seq.to_tokens().into()),
        ("product", seq.to_product(&s).into()),
        ("k_tot", k.into()),
        ("block_probability", block.into()),
        ("target_probability", target.into()),
        ("amp_t", v.amp_t.into()),
        ("amp_bt", v.amp_bt.into()),
        ("amp_bbar", v.amp_bbar.into()),
        (
            "expected_iterations",
            (block > 0.0).then(|| k as f64 / block).into(),
        ),
    ]);
    Ok(rec)
}

fn enumerate(args: &SpaceArgs, ktot: &RangeInclusive<u64>, all_ties: bool) -> Result<OutputRecord> {
    let s = search_space(args)?;
    let mut results = Vec::new();
    for k in ktot.clone() {
        results.push(enumerate_max_probability::<f64>(&s, budget(k)?)?);
    }
    let best = results
        .iter()
        .enumerate()
        .fold(None::<(usize, f64)>, |acc, (i, r)| match acc {
            Some((_, e)) if e <= r.expected_iterations => acc,
            _ => Some((i, r.expected_iterations)),
        })
        .map(|(i, _)| i);
    let mut rec = OutputRecord::new("enumerate")
        .param("n", s.n())
        .param("m", s.m())
        .param("ktot", format!("{}..{}", ktot.start(), ktot.end()))
        .param("all_ties", all_ties);
    for (i, r) in results.iter().enumerate() {
        let shown = if all_ties {
            r.optimal_sequences.len()
        } else {
            1
        };
        for (rank, seq) in r.optimal_sequences.iter().take(shown).enumerate() {
            rec.row(vec![
                ("k_tot", r.k_tot.into()),
                ("rank", rank.into()),
                ("sequence", seq.to_tokens().into()),
                ("product", seq.to_product(&s).into()),
                ("is_grk_form", is_grk_form(seq).into()),
                ("pr_max", r.pr_max.into()),
                ("expected_iterations", r.expected_iterations.into()),
                ("co_optimal", r.optimal_sequences.len().into()),
                ("is_min_expected", (Some(i) == best).into()),
            ]);
        }
    }
    Ok(rec)
}

fn tables(n: u32, which: TableKind, ktot: &RangeInclusive<u64>) -> Result<OutputRecord> {
    if n < 3 {
        bail!("tables need n >= 3 (block sizes start at m = 2)");
    }
    let m_values: Vec<u32> = (2..n).collect();
    let k_values = ktot.clone().map(budget).collect::<Result<Vec<u32>>>()?;
    let rows = table_sweep::<f64>(n, &m_values, &k_values)?;
    let (name, value_column) = match which {
        TableKind::Pr => ("pr", "pr_percent"),
        TableKind::E => ("e", "expected_iterations"),
    };
    let mut rec = OutputRecord::new("tables")
        .param("n", n)
        .param("which", name)
        .param("ktot", format!("{}..{}", ktot.start(), ktot.end()));
    for row in rows {
        let value = match which {
            TableKind::Pr => Cell::Rounded {
                value: row.pr_percent(),
                text: render_percent(row.pr_max),
            },
            TableKind::E => Cell::Rounded {
                value: row.expected_iterations,
                text: render_expected(row.expected_iterations),
            },
        };
        rec.row(vec![
            ("m", row.m.into()),
            ("k_tot", row.k_tot.into()),
            ("operator", row.operator.into()),
            (value_column, value),
            ("is_grk_form", row.is_grk_form.into()),
        ]);
    }
    Ok(rec)
}

fn quantity(name: &str, k_tot: Option<u64>, value: f64, note: Option<&str>) -> Row {
    vec![
        ("quantity", name.into()),
        ("k_tot", k_tot.into()),
        ("value", value.into()),
        ("note", note.into()),
    ]
}

fn bounds_summary(
    n: u32,
    m: Option<u32>,
    ktot_range: Option<&RangeInclusive<u64>>,
) -> Result<OutputRecord> {
    let c = BoundConstants::get();
    let mut rec = OutputRecord::new("bounds")
        .param("n", n)
        .param("m", m.map_or(serde_json::Value::Null, Into::into))
        .param("data", "summary");
    for (name, value) in [
        ("epsilon", c.epsilon),
        ("f_min", c.f_min),
        ("c_grk", c.c_grk),
        ("alpha0_lemma", c.alpha0_lemma),
        ("varepsilon_lemma", c.varepsilon_lemma),
        ("grover_kmin_coeff", c.grover_kmin_coeff),
        ("grover_pr_at_kmin", c.grover_pr_at_kmin),
        ("grover_emin_coeff", c.grover_emin_coeff),
        ("emin_sqrt_n_coeff", c.emin_sqrt_n_coeff),
        ("emin_sqrt_b_coeff", c.emin_sqrt_b_coeff),
        ("crossover_offset", c.crossover_offset),
        ("saturation_root", c.saturation_root),
        ("outer_coeff", c.outer_coeff),
        ("hybrid_kmin_coeff", c.hybrid_kmin_coeff),
        ("hybrid_l2_floor", c.hybrid_l2_floor),
    ] {
        rec.row(quantity(name, None, value, None));
    }
    match bounds::grover_kmin(n) {
        Ok(g) => {
            rec.row(quantity("grover_kmin", None, g.k_min, None));
            rec.row(quantity("grover_emin", None, g.e_min, None));
        }
        Err(_) => {
            let (k, e) = bounds::grover_integer_minimum(n)?;
            let note = Some("integer scan: no interior stationary point");
            rec.row(quantity("grover_kmin", None, k as f64, note));
            rec.row(quantity("grover_emin", None, e, note));
        }
    }
    let Some(m) = m else {
        return Ok(rec);
    };
    let s = SearchSpace::new(n, m)?;
    rec.row(quantity(
        "lemma_optimal_ktot",
        None,
        bounds::lemma_optimal_ktot(&s),
        None,
    ));
    let e = bounds::min_expected_bound(&s);
    rec.row(quantity(
        "min_expected_bound",
        None,
        e.value,
        Some(e.branch.label()),
    ));
    rec.row(quantity(
        "min_expected_asymptotic",
        None,
        e.asymptotic,
        None,
    ));
    rec.row(quantity(
        "min_expected_few_blocks",
        None,
        e.few_blocks,
        None,
    ));
    rec.row(quantity(
        "grk_unit_reference",
        None,
        bounds::grk_unit_reference(&s),
        None,
    ));
    if let Ok(p) = bounds::grk_optimal_parameters(&s) {
        rec.row(quantity("grk_eta", None, p.eta_k, None));
        rec.row(quantity("grk_alpha", None, p.alpha_k, None));
        rec.row(quantity("grk_k1", None, p.k1 as f64, None));
        rec.row(quantity("grk_k2", None, p.k2 as f64, None));
    }
    if let Some(range) = ktot_range {
        for k in range.clone() {
            rec.row(quantity(
                "pr_max_bound",
                Some(k),
                bounds::pr_max_bound(&s, k)?,
                None,
            ));
        }
    }
    Ok(rec)
}

fn default_grover_range(s: &SearchSpace) -> RangeInclusive<u64> {
    1..=(PI * (s.database_size() as f64).sqrt() / 4.0).ceil() as u64
}

fn figure3(n: u32, m: u32, ktot_range: Option<&RangeInclusive<u64>>) -> Result<OutputRecord> {
    let s = SearchSpace::new(n, m)?;
    let range = ktot_range
        .cloned()
        .unwrap_or_else(|| default_grover_range(&s));
    let mut rec = OutputRecord::new("bounds")
        .param("n", n)
        .param("m", m)
        .param("data", "fig3")
        .param("ktot_range", format!("{}..{}", range.start(), range.end()));
    for row in bounds::figure3_sweep(&s, range)? {
        rec.row(vec![
            ("k_tot", row.k_tot.into()),
            ("alpha", row.alpha.into()),
            ("leading", row.leading.into()),
            ("bound", row.bound.into()),
            ("numeric", row.numeric.into()),
            ("k2_numeric", row.k2_numeric.into()),
            ("k2_analytic", row.k2_analytic.into()),
            ("numeric_at_analytic_k2", row.numeric_at_analytic_k2.into()),
        ]);
    }
    Ok(rec)
}

fn figure4(n: u32) -> Result<OutputRecord> {
    let mut rec = OutputRecord::new("bounds")
        .param("n", n)
        .param("data", "fig4");
    for row in bounds::figure4_sweep(n)? {
        rec.row(vec![
            ("m", row.m.into()),
            ("e_min", row.numeric.e_min.into()),
            ("k_tot", row.numeric.k_tot.into()),
            ("k1", row.numeric.k1.into()),
            ("k2", row.numeric.k2.into()),
            ("pr", row.numeric.pr.into()),
            ("bound", row.bound.value.into()),
            ("branch", row.bound.branch.label().into()),
            ("asymptotic", row.bound.asymptotic.into()),
            ("few_blocks", row.bound.few_blocks.into()),
            ("grk_reference", row.grk_reference.into()),
        ]);
    }
    Ok(rec)
}

fn default_qpu_counts(n: u32) -> Vec<u64> {
    let mut l: Vec<u64> = (1..=n as u64).collect();
    l.extend((0..=n).map(|r| 1u64 << r).filter(|&p| p > n as u64));
    l
}

fn scheme_row(r: &SchemeResult) -> Row {
    let (k, k1, k2) = match r.queries {
        Queries::Single { k } => (Some(k), None, None),
        Queries::Grk { k1, k2 } => (None, Some(k1), Some(k2)),
    };
    vec![
        ("scheme", r.kind.name().into()),
        ("n", r.n.into()),
        ("l", r.l.into()),
        ("status", "ok".into()),
        ("k", k.into()),
        ("k1", k1.into()),
        ("k2", k2.into()),
        ("queries", r.queries.total().into()),
        ("e_min", r.e_min.into()),
        ("pr_at_opt", r.pr_at_opt.into()),
    ]
}

fn single_n(n: &[u32]) -> Result<u32> {
    match n {
        [n] => Ok(*n),
        [] => bail!("--n is required"),
        _ => bail!("this scheme takes a single --n"),
    }
}

fn parallel_cmd(scheme: SchemeArg, n: &[u32], l: &[u64], allow_k2: bool) -> Result<OutputRecord> {
    if scheme == SchemeArg::Table4 {
        return table4(n, l, allow_k2);
    }
    let n = single_n(n)?;
    let l_values = if l.is_empty() {
        default_qpu_counts(n)
    } else {
        l.to_vec()
    };
    let mut rec = OutputRecord::new("parallel")
        .param("scheme", format!("{scheme:?}").to_lowercase())
        .param("n", n)
        .param("l", l_values.clone())
        .param("allow_k2", allow_k2);
    let kind = match scheme {
        SchemeArg::Inner => SchemeKind::Inner,
        SchemeArg::Outer => SchemeKind::Outer,
        SchemeArg::Grk => SchemeKind::GrkBased,
        SchemeArg::Hybrid => SchemeKind::Hybrid,
        SchemeArg::Compare => {
            let cmp = parallel::compare_schemes(n, &l_values, allow_k2)?;
            for &l in &l_values {
                for kind in SchemeKind::ALL {
                    if let Some(r) = cmp.get(kind, l) {
                        rec.row(scheme_row(r));
                    } else if let Some(o) = cmp.omitted.iter().find(|o| o.kind == kind && o.l == l)
                    {
                        rec.row(vec![
                            ("scheme", kind.name().into()),
                            ("n", n.into()),
                            ("l", l.into()),
                            ("status", format!("omitted: {}", o.reason).into()),
                            ("k", Cell::Empty),
                            ("k1", Cell::Empty),
                            ("k2", Cell::Empty),
                            ("queries", Cell::Empty),
                            ("e_min", Cell::Empty),
                            ("pr_at_opt", Cell::Empty),
                        ]);
                    }
                }
            }
            return Ok(rec);
        }
        SchemeArg::Table4 => unreachable!("handled above"),
    };
    for &l in &l_values {
        rec.row(scheme_row(&parallel::scheme_min(kind, n, l, allow_k2)?));
    }
    Ok(rec)
}

fn table4(n: &[u32], l: &[u64], allow_k2: bool) -> Result<OutputRecord> {
    if !allow_k2 {
        bail!("--no-k2 does not apply to table4, which reports both variants");
    }
    let n_values = if n.is_empty() {
        vec![18, 21, 24, 27]
    } else {
        n.to_vec()
    };
    let l = match l {
        [] => 3,
        [l] => *l,
        _ => bail!("table4 takes a single --l"),
    };
    let mut rec = OutputRecord::new("parallel")
        .param("scheme", "table4")
        .param("n", n_values.clone())
        .param("l", l);
    for row in parallel::hybrid_table(&n_values, l)? {
        let (Queries::Grk { k1: p1, .. }, Queries::Grk { k1, k2 }) =
            (row.plain.queries, row.with_local.queries)
        else {
            unreachable!("hybrid optima are GRK schedules");
        };
        rec.row(vec![
            ("n", row.n.into()),
            ("l", row.l.into()),
            ("e_plain", row.plain.e_min.into()),
            ("k_plain", (p1 + 1).into()),
            ("e_local", row.with_local.e_min.into()),
            ("k1", k1.into()),
            ("k2", k2.into()),
        ]);
    }
    Ok(rec)
}

fn verify(args: &SpaceArgs, count: usize, max_k: u32, tol: f64, seed: u64) -> Result<OutputRecord> {
    let r = statevec::verify_subspace(args.n, args.m, count, max_k, tol, seed)?;
    let mut rec = OutputRecord::new("verify")
        .param("n", args.n)
        .param("m", args.m)
        .param("sequences", count)
        .param("max_k", max_k)
        .param("tol", tol)
        .param("seed", seed);
    rec.row(vec![
        ("n", r.n.into()),
        ("m", r.m.into()),
        ("sequences", r.sequences.into()),
        ("seed", r.seed.into()),
        ("max_deviation", r.max_deviation.into()),
        ("max_residual", r.max_residual.into()),
        ("worst_sequence", r.worst_sequence.to_tokens().into()),
        ("worst_target", r.worst_target.into()),
        ("passed", true.into()),
    ]);
    Ok(rec)
}
