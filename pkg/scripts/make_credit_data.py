"""Write the synthetic credit screening CSV used by the demo experiments."""

import argparse

from mofs.synth import write_credit_csv

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="credit.csv")
    parser.add_argument("--rows", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    write_credit_csv(args.out, n=args.rows, seed=args.seed)
    print(f"wrote {args.rows} rows to {args.out}")
