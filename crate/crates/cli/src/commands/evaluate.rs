//! `tidemark evaluate`: 70/30 time-ordered split, one-step RMSE on both
//! segments and residual diagnostics of the training fit.

use tidemark_core::sarimax::{diagnostics, evaluate, grid_search, Exog, GridRanges, OrderSpec};
use tidemark_core::timegrid::derive_features;

use crate::commands::Ctx;
use crate::error::Result;
use crate::formats::{write_json, write_onestep, DiagFile, EvalFile};
use crate::price::{align_features, read_price, stack_exog};

pub fn run(ctx: &Ctx) -> Result<Vec<String>> {
    let section = &ctx.config.sarimax;
    let price = read_price(ctx.config.require_price()?)?;
    let n = price.values.len();
    let split = (ctx.config.split_ratio * n as f64).floor() as usize;

    // Regressors: bucket features on the price grid, plus any extra
    // columns carried by the price CSV itself.
    let feature_exog = if section.use_exog {
        let series = ctx.load_clean_buckets()?;
        let features = derive_features(&series);
        align_features(&features, &series, &price.times, price.interval_secs)
    } else {
        Exog::empty()
    };
    let exog = stack_exog(feature_exog, price.exog.clone());

    let order = if section.grid {
        let ranges = GridRanges {
            max_p: section.grid_max_p,
            max_q: section.grid_max_q,
            max_sp: section.grid_max_sp,
            max_sq: section.grid_max_sq,
        };
        let train_exog = exog.slice_rows(0..split);
        grid_search(
            &price.values[..split],
            &train_exog,
            &ranges,
            section.d,
            section.sd,
            section.s,
        )?
        .best
        .order
    } else {
        OrderSpec::seasonal(
            section.p, section.d, section.q, section.sp, section.sd, section.sq, section.s,
        )
    };

    let evaluation = evaluate(&price.values, &exog, &order, ctx.config.split_ratio)?;
    write_json(&ctx.out("eval.json"), &EvalFile::new(&evaluation.report, split))?;
    write_onestep(
        &ctx.out("onestep.csv"),
        &price.times,
        &price.values,
        &evaluation.predictions,
    )?;
    let diag = diagnostics(&evaluation.fit)?;
    write_json(&ctx.out("diag.json"), &DiagFile::from_report(&diag))?;
    Ok(vec!["eval.json".into(), "onestep.csv".into(), "diag.json".into()])
}
