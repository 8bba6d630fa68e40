int dummy_test_engine;
