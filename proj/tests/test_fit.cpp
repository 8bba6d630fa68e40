int dummy_test_fit;
