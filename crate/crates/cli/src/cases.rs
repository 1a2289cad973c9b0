use anyhow::Result;

use multimat::cases::{builtin_with, BUILTIN_IDS};

use crate::args::CasesArgs;

pub fn cases(a: &CasesArgs) -> Result<()> {
    if let Some(id) = &a.show {
        print!("{}", builtin_with(id, a.fix_shock_table)?.to_toml_string()?);
        return Ok(());
    }
    println!("{:<14} {:>4} {:>11} {:>4} {:>10}  description", "id", "dims", "cells", "m", "t_end");
    for id in BUILTIN_IDS {
        let c = builtin_with(id, a.fix_shock_table)?;
        let cells: Vec<String> = c.cells.iter().map(usize::to_string).collect();
        println!(
            "{:<14} {:>4} {:>11} {:>4} {:>10}  {}",
            id,
            c.dims(),
            cells.join("x"),
            c.materials(),
            c.t_end,
            c.description
        );
    }
    Ok(())
}
