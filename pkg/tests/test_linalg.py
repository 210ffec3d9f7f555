import random

import pytest

from oracles import naive_row_hnf, naive_snf_divisors
from classgroup.errors import RankDeficient
from classgroup.intlinalg import (hnf_with_transform, left_kernel, mat_mul,
                                  rank, snf)
from classgroup.polynomials import bareiss_det


def test_hnf_examples():
    H, U = hnf_with_transform([[1, 0], [0, 1]])
    assert H == [[1, 0], [0, 1]] and U == [[1, 0], [0, 1]]
    H, U = hnf_with_transform([[2, 4], [4, 4]])
    assert H == [[2, 0], [0, 4]]
    assert mat_mul(U, [[2, 4], [4, 4]]) == H
    assert abs(bareiss_det(U)) == 1


def test_snf_examples():
    assert snf([[2, 0], [0, 4]]).elementary_divisors == (2, 4)
    g = snf([[2, 4], [4, 4]])
    assert g.elementary_divisors == (2, 4) and g.class_number == 8
    assert snf([[1, 0], [0, 1]]).elementary_divisors == ()
    assert snf([[1, 0], [0, 1]]).class_number == 1


def test_left_kernel_examples():
    k = left_kernel([[1, 1], [1, 1]])
    assert k in ([[1, -1]], [[-1, 1]])
    assert left_kernel([[2, 1], [1, 1]]) == []
    rng = random.Random(6)
    for _ in range(30):
        M = [[rng.randint(-9, 9) for _ in range(6)] for _ in range(8)]
        for v in left_kernel(M):
            assert all(sum(v[i] * M[i][j] for i in range(8)) == 0
                       for j in range(6))


def test_hnf_snf_match_naive_oracle():
    rng = random.Random(99)
    for _ in range(100):
        M = [[rng.randint(-10, 10) for _ in range(6)] for _ in range(6)]
        H, U = hnf_with_transform(M)
        assert H == naive_row_hnf(M)
        assert mat_mul(U, M) == H
        assert abs(bareiss_det(U)) == 1
        mine = [d for d in snf(M).elementary_divisors]
        oracle = [d for d in naive_snf_divisors(M) if d != 1]
        assert mine == oracle


def test_class_number_monotone_under_new_relations(q5):
    # appending verified relations can only divide the class number
    from classgroup.ideals import build_factor_base
    from classgroup.intlinalg import class_group_from_relations
    from classgroup.relations import CollectionConfig, collect

    fb = build_factor_base(q5, 12)
    cfg = CollectionConfig(bound_B=12, k=2, A=2, beta=2, rng_seed=2,
                           trial_budget=4000)
    matrix, _ = collect(q5, fb, cfg)
    g1 = class_group_from_relations(matrix)
    cfg2 = CollectionConfig(bound_B=12, k=2, A=2, beta=2, rng_seed=3,
                            trial_budget=4000)
    matrix2, _ = collect(q5, fb, cfg2, matrix=matrix,
                         target_rows=len(matrix.rows) + 16)
    g2 = class_group_from_relations(matrix2)
    assert g1.class_number % g2.class_number == 0


def test_rank_deficient_signal(q5):
    from classgroup.ideals import build_factor_base
    from classgroup.intlinalg import class_group_from_relations
    from classgroup.relations import RelationMatrix

    fb = build_factor_base(q5, 12)
    matrix = RelationMatrix(fb)
    # a single relation cannot cover the base
    from classgroup.relations import collect, CollectionConfig
    cfg = CollectionConfig(bound_B=12, k=2, A=2, beta=2, rng_seed=2,
                           trial_budget=4000)
    full, _ = collect(q5, fb, cfg)
    matrix.rows.append(full.rows[0])
    with pytest.raises(RankDeficient):
        class_group_from_relations(matrix)


def test_rank():
    assert rank([[1, 0], [0, 1], [1, 1]]) == 2
    assert rank([[2, 4], [1, 2]]) == 1
    assert rank([[0, 0]]) == 0
