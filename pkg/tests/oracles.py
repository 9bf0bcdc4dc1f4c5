"""Independent naive oracles the test suite checks the library against.

These deliberately avoid the library's indexing code: they work on plain
nested Python structures with explicit loops, so a bug in the library
cannot hide in its own oracle.
"""

from __future__ import annotations

import random


def enumerate_addresses(category_lists):
    """All addresses of a cube, last dimension fastest, by explicit recursion."""
    if not category_lists:
        return [()]
    rest = enumerate_addresses(category_lists[1:])
    out = []
    for first in category_lists[0]:
        for tail in rest:
            out.append((first,) + tail)
    return out


def index_map(category_lists):
    """address -> offset for a whole cube, built purely by enumeration order."""
    return {
        tuple(address): i
        for i, address in enumerate(enumerate_addresses(category_lists))
    }


def offset_of(category_lists, address):
    """Linear offset of an address by counting enumeration order."""
    try:
        return index_map(category_lists)[tuple(address)]
    except KeyError:
        raise AssertionError(f"address {address!r} not found") from None


def lookup(category_lists, values, address):
    return values[offset_of(category_lists, address)]


def slice_values(category_lists, values, kept_lists):
    """Expected value sequence after keeping only the given categories."""
    offsets = index_map(category_lists)
    return [
        values[offsets[tuple(address)]] for address in enumerate_addresses(kept_lists)
    ]


def aggregate_values(category_lists, values, axis, groups):
    """Expected value sequence after grouping one axis and summing members.

    ``groups`` is a list of (new_id, [old category ids]); a missing member
    makes the whole group sum missing.
    """
    offsets = index_map(category_lists)
    new_lists = list(category_lists)
    new_lists[axis] = [new_id for new_id, _ in groups]
    out = []
    for address in enumerate_addresses(new_lists):
        group_members = dict(groups)[address[axis]]
        total = 0.0
        missing = False
        for member in group_members:
            member_address = list(address)
            member_address[axis] = member
            cell = values[offsets[tuple(member_address)]]
            if cell is None:
                missing = True
                break
            total += cell
        out.append(None if missing else total)
    return out


def arith_values(a_values, b_values, op):
    out = []
    for left, right in zip(a_values, b_values):
        if left is None or right is None:
            out.append(None)
        elif op == "add":
            out.append(left + right)
        else:
            out.append(left - right)
    return out


def combine_values(value_lists):
    out = []
    for values in value_lists:
        out.extend(values)
    return out


def visible_shares(columns):
    """Percent shares per column over present values; None column total <= 0.

    ``columns`` is a list of lists (one inner list per x position holding
    the visible present absolutes).  Returns a list of lists of shares.
    """
    shares = []
    for column in columns:
        total = sum(column)
        if total <= 0:
            shares.append([0.0 for _ in column])
        else:
            shares.append([v / total * 100.0 for v in column])
    return shares


def random_cube_spec(rng: random.Random, max_dims=4, max_cells=200, missing_rate=0.15):
    """A random cube description: (category_lists, values, dim ids)."""
    n_dims = rng.randint(1, max_dims)
    sizes = []
    cells = 1
    for _ in range(n_dims):
        limit = max(1, max_cells // max(cells, 1))
        size = rng.randint(1, min(6, limit))
        sizes.append(size)
        cells *= size
    dim_ids = [f"d{i}" for i in range(n_dims)]
    category_lists = [[f"d{i}c{j}" for j in range(size)] for i, size in enumerate(sizes)]
    values = [
        None if rng.random() < missing_rate else round(rng.uniform(-1000, 1000), 3)
        for _ in range(cells)
    ]
    return category_lists, values, dim_ids
