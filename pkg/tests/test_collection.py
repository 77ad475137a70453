import json

import numpy as np
import pytest

import tsleakscan as ts
from tsleakscan.collection import REJECT, SPLIT_SKIP


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


class TestLongCsv:
    def test_direct_transcription(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nx,1,0.5\nx,2,0.7\ny,1,1.0\n")
        c = ts.load_collection(p, "long-csv")
        assert c.ids() == ["x", "y"]
        assert list(c.get("x").values) == [0.5, 0.7]
        assert list(c.get("y").values) == [1.0]
        assert c.created_from == "long-csv"

    def test_interleaved_rows_keep_first_appearance_order(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nb,1,1\na,1,2\nb,2,3\n")
        c = ts.load_collection(p, "long-csv")
        assert c.ids() == ["b", "a"]
        assert list(c.get("b").values) == [1.0, 3.0]

    def test_non_contiguous_index_names_row(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nx,1,0.5\nx,3,0.7\n")
        with pytest.raises(ts.FormatError, match=r"c.csv:3.*not contiguous"):
            ts.load_collection(p, "long-csv")

    def test_bad_header(self, tmp_path):
        p = write(tmp_path / "c.csv", "id,t,v\nx,1,0.5\n")
        with pytest.raises(ts.FormatError, match="expected header"):
            ts.load_collection(p, "long-csv")

    def test_unparsable_value_names_row(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nx,1,oops\n")
        with pytest.raises(ts.FormatError, match=r"c.csv:2"):
            ts.load_collection(p, "long-csv")

    def test_missing_value_rejected_with_position(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nx,1,0.5\nx,2,\n")
        with pytest.raises(ts.ValidationError, match=r"'x'.*position 2"):
            ts.load_collection(p, "long-csv")

    def test_nan_literal_is_missing(self, tmp_path):
        p = write(tmp_path / "c.csv", "series_id,index,value\nx,1,0.5\nx,2,nan\n")
        with pytest.raises(ts.ValidationError):
            ts.load_collection(p, "long-csv")
        c = ts.load_collection(p, "long-csv", ts.MissingPolicy(SPLIT_SKIP))
        assert c.get("x").missing == (1,)
        assert np.isfinite(c.get("x").values).all()


class TestWideCsv:
    def test_trailing_blanks_are_padding(self, tmp_path):
        p = write(tmp_path / "c.csv", "x,y\n0.5,1.0\n0.7,\n")
        c = ts.load_collection(p, "wide-csv")
        assert list(c.get("x").values) == [0.5, 0.7]
        assert list(c.get("y").values) == [1.0]

    def test_interior_blank_under_reject(self, tmp_path):
        p = write(tmp_path / "c.csv", "x,y\n0.5,1.0\n,2.0\n0.7,3.0\n")
        with pytest.raises(ts.ValidationError, match="'x'"):
            ts.load_collection(p, "wide-csv")

    def test_interior_blank_under_split_skip(self, tmp_path):
        p = write(tmp_path / "c.csv", "x,y\n0.5,1.0\n,2.0\n0.7,3.0\n")
        c = ts.load_collection(p, "wide-csv", ts.MissingPolicy(SPLIT_SKIP))
        assert c.get("x").missing == (1,)
        assert len(c.get("x")) == 3

    def test_duplicate_id_named(self, tmp_path):
        p = write(tmp_path / "c.csv", "x,x\n1,2\n")
        with pytest.raises(ts.ValidationError, match="'x'"):
            ts.load_collection(p, "wide-csv")

    def test_all_empty_column_rejected(self, tmp_path):
        p = write(tmp_path / "c.csv", "x,y\n1,\n2,\n")
        with pytest.raises(ts.ValidationError, match="'y'"):
            ts.load_collection(p, "wide-csv")


class TestJson:
    def test_basic(self, tmp_path):
        p = write(tmp_path / "c.json", '{"x": [0.5, 0.7], "y": [1.0]}')
        c = ts.load_collection(p, "json")
        assert c.ids() == ["x", "y"]

    def test_duplicate_keys_detected(self, tmp_path):
        p = write(tmp_path / "c.json", '{"x": [1, 2], "x": [3]}')
        with pytest.raises(ts.ValidationError, match="'x'"):
            ts.load_collection(p, "json")

    def test_null_is_missing(self, tmp_path):
        p = write(tmp_path / "c.json", '{"x": [1, null, 3]}')
        with pytest.raises(ts.ValidationError):
            ts.load_collection(p, "json")
        c = ts.load_collection(p, "json", ts.MissingPolicy(SPLIT_SKIP))
        assert c.get("x").missing == (1,)

    def test_invalid_json_is_format_error(self, tmp_path):
        p = write(tmp_path / "c.json", '{"x": [1, 2')
        with pytest.raises(ts.FormatError):
            ts.load_collection(p, "json")

    def test_non_numeric_element(self, tmp_path):
        p = write(tmp_path / "c.json", '{"x": [1, "two"]}')
        with pytest.raises(ts.FormatError, match="element 2"):
            ts.load_collection(p, "json")


class TestValidate:
    def test_constant_series_warning(self):
        c = ts.from_dict({"a": [1, 1, 1, 1]})
        warnings = ts.validate_collection(c)
        assert len(warnings) == 1
        assert "constant" in warnings[0]

    def test_too_short_warnings(self):
        c = ts.from_dict({"a": [1, 2], "b": [3]})
        warnings = ts.validate_collection(c)
        assert len(warnings) == 2
        assert all("too short" in w for w in warnings)

    def test_usage_style_collection_is_clean(self, usage_collection):
        c, _ = usage_collection
        assert ts.validate_collection(c) == []

    def test_confusable_ids(self):
        c = ts.from_dict({"abc": [1, 2, 3], "ABC ": [4, 5, 6]})
        warnings = ts.validate_collection(c)
        assert any("whitespace/case" in w for w in warnings)

    def test_validate_does_not_mutate(self):
        c = ts.from_dict({"a": [1, 1, 1]})
        before = [s.values.copy() for s in c]
        ts.validate_collection(c)
        for s, b in zip(c, before):
            assert np.array_equal(s.values, b)


class TestRoundTrip:
    def test_long_csv_bit_for_bit(self, tmp_path):
        rng = np.random.default_rng(7)
        c = ts.from_dict({f"s{i}": rng.normal(size=int(rng.integers(1, 40))) for i in range(6)})
        p = tmp_path / "out.csv"
        ts.write_collection(c, p, "long-csv")
        back = ts.load_collection(p, "long-csv")
        assert back.ids() == c.ids()
        for a, b in zip(c, back):
            assert a.values.tobytes() == b.values.tobytes()

    def test_json_bit_for_bit(self, tmp_path):
        rng = np.random.default_rng(8)
        c = ts.from_dict({f"s{i}": rng.normal(size=10) * 10 ** int(rng.integers(-8, 9))
                          for i in range(5)})
        p = tmp_path / "out.json"
        ts.write_collection(c, p, "json")
        back = ts.load_collection(p, "json")
        for a, b in zip(c, back):
            assert a.values.tobytes() == b.values.tobytes()

    def test_wide_csv_round_trip_with_unequal_lengths(self, tmp_path):
        c = ts.from_dict({"x": [1.5, 2.5, 3.5], "y": [9.0]})
        p = tmp_path / "out.csv"
        ts.write_collection(c, p, "wide-csv")
        back = ts.load_collection(p, "wide-csv")
        assert [len(s) for s in back] == [3, 1]
        assert list(back.get("y").values) == [9.0]

    def test_missing_positions_survive_round_trip(self, tmp_path):
        c = ts.SeriesCollection([ts.Series("x", np.array([1.0, 0.0, 3.0]), missing=(1,))])
        for fmt in ("long-csv", "json", "wide-csv"):
            p = tmp_path / f"m.{fmt}"
            ts.write_collection(c, p, fmt)
            back = ts.load_collection(p, fmt, ts.MissingPolicy(SPLIT_SKIP))
            assert back.get("x").missing == (1,)

    def test_load_is_deterministic(self, tmp_path):
        p = tmp_path / "c.json"
        write(p, json.dumps({"a": [1.25, 2.5], "b": [3.75]}))
        c1 = ts.load_collection(p, "json")
        c2 = ts.load_collection(p, "json")
        assert c1.ids() == c2.ids()
        for a, b in zip(c1, c2):
            assert a.values.tobytes() == b.values.tobytes()


class TestInvariants:
    def test_duplicate_id_from_dict(self):
        with pytest.raises(ts.ValidationError):
            ts.SeriesCollection([ts.Series("a", np.ones(3)), ts.Series("a", np.ones(3))])

    def test_non_finite_rejected(self):
        with pytest.raises(ts.ValidationError):
            ts.from_dict({"a": [1.0, float("nan")]})

    def test_values_are_read_only(self):
        c = ts.from_dict({"a": [1.0, 2.0]})
        with pytest.raises(ValueError):
            c.get("a").values[0] = 9.0

    def test_unknown_format(self, tmp_path):
        p = write(tmp_path / "c.txt", "x")
        with pytest.raises(ts.ValidationError, match="unknown format"):
            ts.load_collection(p, "tsv")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ts.ValidationError, match="not found"):
            ts.load_collection(tmp_path / "nope.csv", "long-csv")
