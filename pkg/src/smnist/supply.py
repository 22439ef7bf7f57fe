"""Combinatorial supply counts and dataset validation.

The theoretical supply of n-object images over P legal positions is
C(P, n) when identity is decided by the center set (single-pixel dots,
glyph anchors).  verify_dataset checks a generated pair against every
structural rule its variant promises and renders the classic
theoretical-vs-statistics table.
"""

import math
from dataclasses import dataclass


def n_choose_k(p: int, n: int) -> int:
    """Exact binomial coefficient; rejects n outside 0..p."""
    if n < 0 or n > p:
        raise ValueError(f"n={n} outside 0..{p}")
    return math.comb(p, n)


def variations(p: int, n: int) -> int:
    """Falling factorial p!/(p-n)!: ordered placements without repetition."""
    if n < 0 or n > p:
        raise ValueError(f"n={n} outside 0..{p}")
    return math.perm(p, n)


@dataclass
class SupplyRow:
    label: int
    theoretical_train: int | None
    theoretical_test: int | None
    observed_train: int
    observed_test: int


@dataclass
class SupplyTable:
    rows: list

    def render(self) -> str:
        header = f"{'':>5}{'theoretical':>26}{'statistics':>20}"
        sub = f"{'dots':>5}{'train':>14}{'test':>12}{'train':>10}{'test':>10}"
        lines = [header, sub]
        for r in self.rows:
            tt = "-" if r.theoretical_train is None else str(r.theoretical_train)
            te = "-" if r.theoretical_test is None else str(r.theoretical_test)
            lines.append(
                f"{r.label:>5}{tt:>14}{te:>12}{r.observed_train:>10}{r.observed_test:>10}"
            )
        return "\n".join(lines)


@dataclass
class ValidationReport:
    ok: bool
    failures: list
    table: SupplyTable

    def render(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        out = [self.table.render(), f"validation: {verdict}"]
        out.extend(f"  - {f}" for f in self.failures)
        return "\n".join(out)


def _zero_key(size):
    from .canvas import blank, canonical_key

    return canonical_key(blank(size, size))


def _image_centers(split, spec, i):
    """Stamp centers of image i: recomputed from pixels for 1px dots,
    taken from the construction log otherwise."""
    from .canvas import foreground_positions

    if spec.stamps[0].value == "1px" and not spec.glyph_mode:
        return foreground_positions(split.images[i])
    if split.centers is None:
        raise ValueError("construction log required for 3x3/glyph datasets")
    return split.centers[i]


def verify_dataset(pair) -> ValidationReport:
    """Check a GeneratedPair (fresh or loaded) against its variant's rules."""
    spec = pair.spec
    failures = []
    size = spec.image_size
    zero_key = _zero_key(size)

    splits = {"train": pair.train, "test": pair.test}
    for side, split in splits.items():
        if len(split.images) != len(split.labels):
            failures.append(f"{side}: image/label count mismatch")
        if histogram_mismatch(split):
            failures.append(f"{side}: histogram inconsistent with labels")
        for i, lbl in enumerate(split.labels):
            if lbl > spec.m:
                failures.append(f"{side}[{i}]: label {lbl} exceeds m={spec.m}")
                break

    # labels count placed stamps; construction log must reproduce each image
    for side, split in splits.items():
        bad = _check_images(split, spec, size)
        if bad:
            failures.append(f"{side}: {bad}")

    # uniqueness: pixel identity for dot datasets, anchor sets for glyph
    # datasets (overlapping glyphs are allowed to collide pixelwise)
    if spec.unique_images:
        if spec.variant == "disjunct":
            failures.extend(_check_unique(
                [("train", pair.train), ("test", pair.test)],
                zero_key, "train+test", spec.glyph_mode))
        else:
            for side, split in splits.items():
                failures.extend(_check_unique(
                    [(side, split)], zero_key, side, spec.glyph_mode))

    # the all-zero rule
    if spec.standalone_zero:
        for side, split in splits.items():
            zeros = split.histogram.get(0, 0)
            if len(split) > 0 and zeros != 1:
                failures.append(f"{side}: {zeros} zero-count images, expected exactly 1")

    # partition containment
    if spec.variant == "hard":
        if pair.partition is None:
            failures.append("hard variant without a recorded partition")
        else:
            sides = {"train": set(pair.partition.train_side),
                     "test": set(pair.partition.test_side)}
            for side, split in splits.items():
                for i in range(len(split)):
                    centers = _image_centers(split, spec, i)
                    outside = [c for c in centers if tuple(c) not in sides[side]]
                    if outside:
                        failures.append(
                            f"{side}[{i}]: centers {outside} outside the {side} side"
                        )
                        break

    table = _supply_table(pair)

    # supply bounds and exhausted-label equality (label 0 is exempt from
    # uniqueness, so it carries no bound)
    if spec.distinct_centers:
        for row in table.rows:
            if row.label == 0 or row.theoretical_train is None:
                continue
            if spec.variant == "hard":
                if row.observed_train > row.theoretical_train:
                    failures.append(
                        f"train label {row.label}: {row.observed_train} images exceed "
                        f"supply {row.theoretical_train}")
                if row.observed_test > row.theoretical_test:
                    failures.append(
                        f"test label {row.label}: {row.observed_test} images exceed "
                        f"supply {row.theoretical_test}")
            else:  # disjunct: shared pool
                combined = row.observed_train + row.observed_test
                if combined > row.theoretical_train:
                    failures.append(
                        f"label {row.label}: {combined} images across splits exceed "
                        f"supply {row.theoretical_train}")
        failures.extend(_check_exhausted(pair, table))

    return ValidationReport(ok=not failures, failures=failures, table=table)


def histogram_mismatch(split) -> bool:
    from .datasets import histogram_of

    return split.histogram != histogram_of(split.labels) or \
        sum(split.histogram.values()) != len(split)


def _check_images(split, spec, size):
    from .canvas import foreground_count, render, render_glyphs

    one_px = spec.stamps[0].value == "1px" and not spec.glyph_mode
    for i, grid in enumerate(split.images):
        label = split.labels[i]
        if one_px:
            if foreground_count(grid) != label:
                return (f"image {i}: {foreground_count(grid)} foreground pixels "
                        f"disagree with label {label}")
        elif split.centers is not None:
            centers = split.centers[i]
            if len(centers) != label:
                return f"image {i}: log has {len(centers)} centers, label {label}"
            if spec.glyph_mode:
                redrawn = render_glyphs(size, size, centers, split.glyphs[i])
            else:
                redrawn = render(size, size, centers, spec.stamps[0], clip=False)
            if redrawn.data != grid.data:
                return f"image {i}: pixels disagree with construction log"
    return None


def _check_unique(sides, zero_key, scope, glyph_mode):
    from .canvas import canonical_key

    failures = []
    seen = {}
    for side, split in sides:
        for i, grid in enumerate(split.images):
            if glyph_mode:
                if split.labels[i] == 0:
                    continue
                key = tuple(sorted(map(tuple, split.centers[i])))
            else:
                key = canonical_key(grid)
                if key == zero_key:
                    continue  # the all-zero image is exempt
            if key in seen:
                failures.append(
                    f"duplicate image across {scope}: {side}[{i}] repeats {seen[key]}"
                )
                if len(failures) >= 5:
                    return failures
            else:
                seen[key] = f"{side}[{i}]"
    return failures


def _check_exhausted(pair, table):
    """A label the generator declared exhausted must sit exactly at supply."""
    failures = []
    by_label = {r.label: r for r in table.rows}
    for side in ("train", "test"):
        for n in pair.exhausted.get(side, []):
            row = by_label.get(n)
            if row is None or n == 0:
                continue
            if pair.spec.variant == "hard":
                theo = row.theoretical_train if side == "train" else row.theoretical_test
                obs = row.observed_train if side == "train" else row.observed_test
            else:
                theo = row.theoretical_train
                obs = row.observed_train + row.observed_test
            if theo is not None and obs != theo:
                failures.append(
                    f"{side} label {n} declared exhausted at {obs}, supply is {theo}"
                )
    return failures


def _supply_table(pair) -> SupplyTable:
    spec = pair.spec
    # exact supply only when the center set decides identity
    computable = spec.distinct_centers and spec.stamps[0].value != "3x3"
    if spec.variant == "hard" and pair.partition is not None:
        p_train, p_test = pair.partition.sizes
    else:
        p_train = p_test = len(spec.center_positions)

    rows = []
    for n in range(0, spec.m + 1):
        theo_train = theo_test = None
        if computable:
            theo_train = n_choose_k(p_train, n) if n <= p_train else 0
            theo_test = n_choose_k(p_test, n) if n <= p_test else 0
        rows.append(SupplyRow(
            label=n,
            theoretical_train=theo_train,
            theoretical_test=theo_test,
            observed_train=pair.train.histogram.get(n, 0),
            observed_test=pair.test.histogram.get(n, 0),
        ))
    return SupplyTable(rows=rows)
