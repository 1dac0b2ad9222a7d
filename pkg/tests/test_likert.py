import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskwalk.errors import EmptyInput, ParseError
from riskwalk.likert import (
    LikertResponse,
    interpolated_median,
    parse_survey_csv,
    parse_value,
    percent_favourable,
    summarize_statements,
)

from oracle_im import oracle_interpolated_median

multisets = st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=60)


class TestInterpolatedMedian:
    def test_all_equal(self):
        assert interpolated_median([4, 4, 4, 4]) == 4.0

    def test_hand_worked_value(self):
        # m=4, N=4, cb=1, cm=2 -> 3.5 + (2-1)/2
        assert interpolated_median([3, 4, 4, 5]) == 4.0

    def test_plain_median_fallback(self):
        assert interpolated_median([1, 5]) == 3.0

    def test_no_recall_excluded(self):
        assert interpolated_median([None, 4, None, 4]) == 4.0

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            interpolated_median([])
        with pytest.raises(EmptyInput):
            interpolated_median([None])

    @given(multisets)
    def test_bounds(self, values):
        im = interpolated_median(values)
        assert min(values) <= im <= max(values)

    @given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=30))
    def test_constant_multiset_identity(self, v, n):
        assert interpolated_median([v] * n) == float(v)

    @given(multisets)
    def test_appending_top_score_never_decreases(self, values):
        assert interpolated_median(values + [5]) >= interpolated_median(values)

    @given(multisets)
    @settings(max_examples=300)
    def test_matches_cumulative_count_oracle(self, values):
        assert interpolated_median(values) == pytest.approx(
            oracle_interpolated_median(values), abs=1e-12
        )

    @given(multisets)
    def test_permutation_invariant(self, values):
        assert interpolated_median(values) == interpolated_median(
            list(reversed(sorted(values)))
        )


class TestPercentFavourable:
    def test_all_favourable(self):
        assert percent_favourable([4, 5, 4, 5]) == 1.0

    def test_direct_count(self):
        assert percent_favourable([2, 4, 4, 5, 3, 1, 2, 3]) == pytest.approx(0.375)

    def test_beta_confidence_statement(self):
        # 10 respondents, 5 favourable
        assert percent_favourable([4, 4, 5, 5, 4, 1, 2, 3, 3, 2]) == 0.5

    def test_all_neutral_is_zero(self):
        assert percent_favourable([3, 3, 3]) == 0.0

    def test_no_recall_excluded_from_both_sides(self):
        assert percent_favourable([4, 4, 1, 2, 3, 3, 2, 1, None, None]) == 0.25

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            percent_favourable([None, None])

    @given(multisets)
    def test_bounds_and_permutation_invariance(self, values):
        pf = percent_favourable(values)
        assert 0.0 <= pf <= 1.0
        assert pf == percent_favourable(sorted(values))


class TestSurveyParsing:
    def test_parse_values(self):
        assert parse_value("3") == 3
        assert parse_value(" NR ") is None
        assert parse_value("nr") is None

    def test_value_domain_closed(self):
        with pytest.raises(ParseError):
            parse_value("6")
        with pytest.raises(ParseError):
            parse_value("zero")

    def test_csv_roundtrip(self):
        text = (
            "respondent_id,statement_id,value\n"
            "r1,s1,4\n"
            "r1,s2,NR\n"
            "r2,s1,2\n"
        )
        responses = parse_survey_csv(text)
        assert len(responses) == 3
        assert responses[1].value is None

    def test_duplicate_pair_rejected(self):
        text = "respondent_id,statement_id,value\nr1,s1,4\nr1,s1,5\n"
        with pytest.raises(ParseError):
            parse_survey_csv(text)

    def test_missing_header_rejected(self):
        with pytest.raises(ParseError):
            parse_survey_csv("a,b,c\n1,2,3\n")

    def test_bad_value_reports_line(self):
        text = "respondent_id,statement_id,value\nr1,s1,4\nr2,s1,9\n"
        with pytest.raises(ParseError) as excinfo:
            parse_survey_csv(text)
        assert "line 3" in excinfo.value.message


class TestSummaries:
    def test_statement_grouping(self):
        responses = [
            LikertResponse("r%d" % i, "confidence", v)
            for i, v in enumerate([4, 4, 5, 5, 4, 1, 2, 3, 3, 2])
        ] + [
            LikertResponse("r%d" % i, "mental-effort", v)
            for i, v in enumerate([4, 4, 1, 2, 3, 3, 2, 1, None, None])
        ]
        summaries = {s.statement_id: s for s in summarize_statements(responses)}
        assert summaries["confidence"].percent_favourable == 0.5
        assert summaries["confidence"].n_substantive == 10
        assert summaries["mental-effort"].percent_favourable == 0.25
        assert summaries["mental-effort"].n_substantive == 8

    def test_all_no_recall_statement_omitted(self):
        responses = [LikertResponse("r1", "s1", None), LikertResponse("r2", "s1", None)]
        assert summarize_statements(responses) == []
