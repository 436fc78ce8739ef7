import polars as pl


Frame = pl.LazyFrame
