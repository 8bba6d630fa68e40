int dummy_test_state;
