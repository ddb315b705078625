"""Shared fixtures: the demographic / store-sales / product tables used
throughout the suite, loaded through a Session so they carry graphs and
declared properties."""

import textwrap

import pytest

from summar_guard.properties import BASIC, GSUM, SUM_MODE
from summar_guard.session import Session

REGION_CSV = textwrap.dedent("""\
    City,State,Country,Region
    Dublin,California,USA,North America
    Palo Alto,California,USA,North America
    San Jose,California,USA,North America
    Dublin,Ohio,USA,North America
    Washington DC,-,USA,North America
    Dublin,-,Ireland,Europe
    """)

DEM_CSV = textwrap.dedent("""\
    City,State,Country,Year,Pop,Unemp
    Dublin,California,USA,2017,61,3.1
    Palo Alto,California,USA,2017,67,2.1
    Dublin,California,USA,2018,63,3.0
    Palo Alto,California,USA,2018,66,2.0
    San Jose,California,USA,2018,1028,2.2
    Dublin,Ohio,USA,2018,44,3.7
    Washington DC,-,USA,2018,672,6.2
    Dublin,-,Ireland,2018,1348,6.71
    """)

# the six-row sales organisation of the attribute-graph figures
SALESORG_CSV = textwrap.dedent("""\
    Store_Id,City,State,Country
    Oh_01,Dublin,Ohio,USA
    Ca_01,Dublin,California,USA
    Ca_02,Palo Alto,California,USA
    Pa_01,Paris,-,France
    Ly_01,Lyon,-,France
    Ir_01,Dublin,-,Ireland
    """)

# the sales organisation backing the introduction's session (store ids match
# the STORE_SALES rows; spellings normalized)
SALESORG_SALES_CSV = textwrap.dedent("""\
    Store_Id,City,State,Country
    Ca_01,Dublin,California,USA
    Ca_02,Dublin,California,USA
    Sa_01,San Jose,California,USA
    Oh_01,Dublin,Ohio,USA
    Wa_01,Washington DC,-,USA
    Wa_02,Washington DC,-,USA
    Du_01,Dublin,-,Ireland
    """)

STORE_SALES_CSV = textwrap.dedent("""\
    Store_Id,City,State,Country,Year,Amount
    Ca_01,Dublin,California,USA,2018,5.3
    Ca_02,Dublin,California,USA,2018,1.4
    Ca_01,Dublin,California,USA,2017,3.5
    Sa_01,San Jose,California,USA,2018,22.8
    Oh_01,Dublin,Ohio,USA,2018,1.2
    Wa_01,Washington DC,-,USA,2018,16.1
    Wa_02,Washington DC,-,USA,2018,27.6
    Du_01,Dublin,-,Ireland,2018,7.8
    """)

PROD_CSV = textwrap.dedent("""\
    Prod_Sku,Brand,Country,Subcategory,Category
    coco-can-33cl,Coco Cola,USA,Soft Drinks,Drinks
    coco-can-25cl,Coco Cola,USA,Soft Drinks,Drinks
    cz-tshirt-s,Zora,Spain,Woman Tops,Clothes
    cz-tshirt-s,Coco Cola,USA,Woman Tops,Clothes
    """)

PRODUCT_LIST_CSV = textwrap.dedent("""\
    Prod_Sku,Brand,Country,Year,Qty
    cz-tshirt-s,Coco Cola,USA,2017,5000
    cz-tshirt-s,Coco Cola,USA,2018,7000
    cz-tshirt-s,Zora,Spain,2017,5000
    cz-tshirt-s,Zora,Spain,2018,7000
    coco-can-33cl,Coco Cola,USA,2017,10000
    """)

TIME_CSV = "Year\n2017\n2018\n"

STORE_SALES_YEARLY_CSV = textwrap.dedent("""\
    Store_Id,City,Year,Amount
    Oh_01,Dublin,2017,3.2
    Ca_01,Dublin,2017,5.3
    Oh_01,Dublin,2018,8.2
    Ca_01,Dublin,2018,6.3
    Pa_01,Paris,2017,45.1
    """)

DEM2_CSV = textwrap.dedent("""\
    City,State,Country,Year,Unemp
    Dublin,Ohio,USA,2017,4.2
    Dublin,California,USA,2017,3.1
    Palo Alto,California,USA,2017,2.1
    Paris,-,France,2017,11.9
    Dublin,-,Ireland,2017,6.7
    """)

SALESORG_PARENTS = {"Store_Id": ["City"], "City": ["State"], "State": ["Country"]}
SALESORG_NULLABLE = {"City": True, "State": True}
REGION_PARENTS = {"City": ["State"], "State": ["Country"], "Country": ["Region"]}
REGION_NULLABLE = {"State": True}
PROD_PARENTS = {
    "Prod_Sku": ["Brand", "Subcategory"],
    "Brand": ["Country"],
    "Subcategory": ["Category"],
}
TIME_PARENTS = {}


def declare_time(session):
    session.declare_dimension("TIME", TIME_CSV, TIME_PARENTS)


def declare_dem(session):
    session.declare_dimension("REGION", REGION_CSV, REGION_PARENTS,
                              nullable=REGION_NULLABLE)
    if "TIME" not in session.graphs:
        declare_time(session)
    # Pop keeps the default determinant (the fact identifier); summing it
    # across years is meaningless, hence the forbidden Year
    session.declare_fact(
        "DEM", DEM_CSV,
        dims={"REGION": ["City", "State", "Country"], "TIME": ["Year"]},
        measures={"Pop": "NUM", "Unemp": "STAT"},
        overrides={
            "Pop": {"x_f": ["Year"]},
            "Unemp": {"x_d": ["City", "State", "Country", "Year"], "x_f": ["Year"]},
        },
    )


def declare_store_sales(session):
    session.declare_dimension("SALESORG", SALESORG_SALES_CSV, SALESORG_PARENTS,
                              nullable=SALESORG_NULLABLE)
    if "TIME" not in session.graphs:
        declare_time(session)
    session.declare_fact(
        "STORE_SALES", STORE_SALES_CSV,
        dims={"SALESORG": ["Store_Id", "City", "State", "Country"], "TIME": ["Year"]},
        measures={"Amount": "NUM"},
        overrides={"Amount": {"x_d": ["Store_Id", "Year"], "x_f": ["Year"]}},
    )


def declare_product_list(session):
    session.declare_dimension("PROD", PROD_CSV, PROD_PARENTS)
    if "TIME" not in session.graphs:
        declare_time(session)
    session.declare_fact(
        "PRODUCT_LIST", PRODUCT_LIST_CSV,
        dims={"PROD": ["Prod_Sku", "Brand", "Country"], "TIME": ["Year"]},
        measures={"Qty": "NUM"},
        overrides={"Qty": {"x_d": ["Prod_Sku", "Year"], "x_f": []}},
    )


def declare_merge_fixture(session):
    session.declare_dimension("SALESORG", SALESORG_CSV, SALESORG_PARENTS,
                              nullable=SALESORG_NULLABLE)
    session.declare_dimension("REGION", REGION_CSV, REGION_PARENTS,
                              nullable=REGION_NULLABLE)
    declare_time(session)
    session.declare_fact(
        "STORE_SALES_YEARLY", STORE_SALES_YEARLY_CSV,
        dims={"SALESORG": ["Store_Id", "City"], "TIME": ["Year"]},
        measures={"Amount": "NUM"},
        overrides={"Amount": {"x_d": ["Store_Id", "Year"], "x_f": []}},
    )
    session.declare_fact(
        "DEM2", DEM2_CSV,
        dims={"REGION": ["City", "State", "Country"], "TIME": ["Year"]},
        measures={"Unemp": "STAT"},
        overrides={"Unemp": {"x_d": ["City", "State", "Country", "Year"], "x_f": []}},
    )


@pytest.fixture
def dem_session():
    s = Session(mode=SUM_MODE)
    declare_dem(s)
    return s


@pytest.fixture
def sales_session():
    s = Session(mode=GSUM)
    declare_store_sales(s)
    declare_dem(s)
    return s


@pytest.fixture
def product_session():
    s = Session(mode=SUM_MODE)
    declare_product_list(s)
    return s


@pytest.fixture
def merge_session():
    s = Session(mode=BASIC)
    declare_merge_fixture(s)
    return s
