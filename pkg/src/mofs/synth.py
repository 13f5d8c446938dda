"""Synthetic benchmark datasets with planted structure.

The credit generator mimics a small consumer-credit screening task: a latent
creditworthiness signal drives a few honest features, while income and job
type act as proxies for the sensitive attribute. A model trained on all
columns inherits the proxy bias; subsets that avoid the proxies predict almost
as well and far more fairly, which is the trade-off the search is meant to
surface.
"""

from __future__ import annotations

import csv

import numpy as np

from mofs.data import Dataset

CREDIT_TARGET = "credit_risk"
CREDIT_SENSITIVE = "sex"
CREDIT_POSITIVE = "good"


def credit_rows(n: int = 1000, seed: int = 0) -> tuple[list[str], list[list[str]]]:
    """Header and string rows for a 21-feature credit-like CSV."""
    rng = np.random.default_rng(seed)
    is_male = rng.random(n) < 0.55
    z = rng.normal(size=n)  # latent creditworthiness, independent of sex
    q = 1.0 * is_male + 0.6 * rng.normal(size=n)  # proxy latent

    employment_years = np.clip(np.round(3 + 2.2 * z + 0.8 * rng.normal(size=n)), 0, 40)
    duration_months = np.clip(np.round(24 - 5 * z + 6 * rng.normal(size=n)), 4, 72)
    checking_levels = np.array(["none", "low", "medium", "high"])
    checking_status = checking_levels[
        np.clip(np.digitize(z + 0.4 * rng.normal(size=n), [-0.8, 0.0, 0.8]), 0, 3)
    ]
    savings_levels = np.array(["little", "moderate", "rich"])
    savings_status = savings_levels[
        np.clip(np.digitize(0.7 * z + 0.7 * rng.normal(size=n), [-0.5, 0.7]), 0, 2)
    ]

    income = np.round(2200 + 700 * q + 250 * rng.normal(size=n), 2)
    job_levels = np.array(["unskilled", "skilled", "management"])
    job_type = job_levels[np.clip(np.digitize(q + 0.3 * rng.normal(size=n), [0.2, 1.2]), 0, 2)]

    age = np.clip(np.round(35 + 11 * rng.normal(size=n)), 18, 80)
    credit_amount = np.round(np.exp(7.7 + 0.8 * rng.normal(size=n)), 2)
    residence_years = rng.integers(0, 30, size=n)
    installment_rate = rng.integers(1, 5, size=n)
    existing_credits = rng.integers(1, 4, size=n)
    dependents = rng.integers(0, 3, size=n)
    purpose = rng.choice(["car", "furniture", "education", "business", "repairs"], size=n)
    housing = rng.choice(["own", "rent", "free"], size=n)
    property_type = rng.choice(["real_estate", "savings", "car", "none"], size=n)
    telephone = rng.choice(["yes", "no"], size=n)
    foreign_worker = rng.choice(["yes", "no"], size=n, p=[0.9, 0.1])
    other_loans = rng.choice(["none", "bank", "stores"], size=n, p=[0.8, 0.12, 0.08])
    guarantor = rng.choice(["none", "co_applicant", "guarantor"], size=n, p=[0.85, 0.08, 0.07])
    marital_status = rng.choice(["single", "married", "divorced"], size=n)

    score = 1.3 * z + 1.0 * q + 0.9 * rng.normal(size=n)
    target = np.where(score > np.quantile(score, 0.35), CREDIT_POSITIVE, "bad")

    header = [
        "checking_status",
        "duration_months",
        "credit_history_len",
        "purpose",
        "credit_amount",
        "savings_status",
        "employment_years",
        "installment_rate",
        CREDIT_SENSITIVE,
        "guarantor",
        "residence_years",
        "property_type",
        "age",
        "other_loans",
        "housing",
        "existing_credits",
        "job_type",
        "dependents",
        "telephone",
        "foreign_worker",
        "income",
        CREDIT_TARGET,
    ]
    credit_history_len = np.clip(np.round(4 + 3 * rng.normal(size=n)), 0, 30)
    sex = np.where(is_male, "male", "female")

    columns = [
        checking_status,
        duration_months,
        credit_history_len,
        purpose,
        credit_amount,
        savings_status,
        employment_years,
        installment_rate,
        sex,
        guarantor,
        residence_years,
        property_type,
        age,
        other_loans,
        housing,
        existing_credits,
        job_type,
        dependents,
        telephone,
        foreign_worker,
        income,
        target,
    ]
    rows = [[str(col[i]) for col in columns] for i in range(n)]
    return header, rows


def write_credit_csv(path, n: int = 1000, seed: int = 0) -> None:
    header, rows = credit_rows(n=n, seed=seed)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def perfect_feature_dataset(n: int = 300, m: int = 10, seed: int = 0) -> Dataset:
    """m-feature dataset where feature 0 separates the classes perfectly.

    Features 1-2 are weak signals, the last feature doubles as a balanced
    binary sensitive attribute, the rest is noise.
    """
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < 0.5).astype(int)
    group = (rng.random(n) < 0.5).astype(int)
    features = rng.normal(size=(n, m))
    features[:, 0] = y + 0.05 * rng.normal(size=n)
    features[:, 1] = 0.8 * y + rng.normal(size=n)
    features[:, 2] = 0.5 * y + rng.normal(size=n)
    features[:, m - 1] = group
    # Guarantee both classes and both groups despite the random draw.
    y[0], y[1] = 0, 1
    group[0], group[1] = 0, 1
    features[0, 0], features[1, 0] = 0.0, 1.0
    features[:, m - 1] = group
    return Dataset(
        name=f"perfect-{m}f",
        feature_names=tuple(f"f{j}" for j in range(m)),
        features=features,
        target=y,
        sensitive_index=m - 1,
        sensitive_groups=group.copy(),
        column_kinds=tuple(
            "categorical" if j == m - 1 else "numeric" for j in range(m)
        ),
    )


def tiny_rows(n: int = 120, seed: int = 0) -> tuple[list[str], list[list[str]]]:
    """Small 6-feature CSV for fast end-to-end runs."""
    rng = np.random.default_rng(seed)
    z = rng.normal(size=n)
    group = np.where(rng.random(n) < 0.5, "a", "b")
    f_signal = np.round(z + 0.2 * rng.normal(size=n), 4)
    f_weak = np.round(0.6 * z + rng.normal(size=n), 4)
    f_noise1 = np.round(rng.normal(size=n), 4)
    f_noise2 = rng.integers(0, 5, size=n)
    f_cat = rng.choice(["x", "y", "z"], size=n)
    label = np.where(z + 0.4 * rng.normal(size=n) > 0, "yes", "no")
    label[0], label[1] = "yes", "no"
    group[0], group[1] = "a", "b"
    header = ["signal", "weak", "noise1", "noise2", "shade", "grp", "outcome"]
    rows = [
        [
            str(f_signal[i]),
            str(f_weak[i]),
            str(f_noise1[i]),
            str(int(f_noise2[i])),
            str(f_cat[i]),
            str(group[i]),
            str(label[i]),
        ]
        for i in range(n)
    ]
    return header, rows


def write_tiny_csv(path, n: int = 120, seed: int = 0) -> None:
    header, rows = tiny_rows(n=n, seed=seed)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
