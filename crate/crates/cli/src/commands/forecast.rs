//! `tidemark forecast`: fit (or grid-search) on the training split of the
//! price series and forecast into the test window, whose social-signal
//! regressors are known.

use tidemark_core::sarimax::{fit, forecast, grid_search, Exog, GridRanges, OrderSpec};
use tidemark_core::timegrid::derive_features;

use crate::commands::Ctx;
use crate::error::{CliError, Result};
use crate::formats::{write_forecast, write_grid, write_json, FitFile};
use crate::price::{align_features, read_price, stack_exog};

pub fn run(ctx: &Ctx, horizon_flag: Option<usize>) -> Result<Vec<String>> {
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
    let exog_full = stack_exog(feature_exog, price.exog.clone());

    let has_exog = exog_full.n_cols() > 0;
    let horizon = horizon_flag.unwrap_or(section.horizon);
    if has_exog && split + horizon > n {
        return Err(CliError::data(format!(
            "forecast horizon {horizon} needs future exogenous rows beyond the series; \
             only {} test observations are available",
            n - split
        )));
    }

    let train_endog = &price.values[..split];
    let train_exog = exog_full.slice_rows(0..split);

    let mut outputs = Vec::new();
    let best_fit = if section.grid {
        let ranges = GridRanges {
            max_p: section.grid_max_p,
            max_q: section.grid_max_q,
            max_sp: section.grid_max_sp,
            max_sq: section.grid_max_sq,
        };
        let result = grid_search(
            train_endog,
            &train_exog,
            &ranges,
            section.d,
            section.sd,
            section.s,
        )?;
        write_grid(&ctx.out("grid.csv"), &result.table)?;
        outputs.push("grid.csv".into());
        result.best
    } else {
        let order = OrderSpec::seasonal(
            section.p, section.d, section.q, section.sp, section.sd, section.sq, section.s,
        );
        fit(train_endog, &train_exog, &order)?
    };
    write_json(&ctx.out("fit.json"), &FitFile::from_fit(&best_fit))?;
    outputs.push("fit.json".into());

    let future_exog = if has_exog {
        exog_full.slice_rows(split..split + horizon)
    } else {
        Exog::empty()
    };
    let result = forecast(&best_fit, horizon, &future_exog)?;
    let times: Vec<i64> = (1..=horizon)
        .map(|j| price.times[split - 1] + j as i64 * price.interval_secs)
        .collect();
    write_forecast(&ctx.out("forecast.csv"), &times, &result)?;
    outputs.push("forecast.csv".into());
    Ok(outputs)
}
